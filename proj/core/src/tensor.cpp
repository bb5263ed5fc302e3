#include "tphase/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "tphase/matrix_kernels.hpp"

namespace tphase {

namespace {

void require_same_shape(const Tensor3& a, const Tensor3& b, const char* what) {
  if (!a.same_shape(b)) {
    throw Error(ErrorCode::kDimensionMismatch, std::string(what) + ": tensor shapes differ");
  }
}

void require_frontal_square(const Tensor3& a, const char* what) {
  if (!a.frontal_square()) {
    throw Error(ErrorCode::kDimensionMismatch, std::string(what) + ": tensor is not frontal-square");
  }
}

}  // namespace

Tensor3::Tensor3(Index m, Index n, Index p) : m_(m), n_(n) {
  if (m < 0 || n < 0 || p < 1) {
    throw Error(ErrorCode::kInvalidArgument, "tensor dimensions must satisfy m, n >= 0 and p >= 1");
  }
  slices_.assign(static_cast<std::size_t>(p), CMatrix::Zero(m, n));
}

Tensor3 Tensor3::from_slices(std::vector<CMatrix> slices) {
  if (slices.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "a tensor needs at least one frontal slice");
  }
  Tensor3 t;
  t.m_ = slices.front().rows();
  t.n_ = slices.front().cols();
  for (const auto& s : slices) {
    if (s.rows() != t.m_ || s.cols() != t.n_) {
      throw Error(ErrorCode::kDimensionMismatch, "frontal slices have different shapes");
    }
    if (!s.allFinite()) {
      throw Error(ErrorCode::kInvalidArgument, "tensor entries must be finite");
    }
  }
  t.slices_ = std::move(slices);
  return t;
}

Tensor3 Tensor3::identity(Index n, Index p) {
  Tensor3 t(n, n, p);
  t.slices_.front().setIdentity();
  return t;
}

double Tensor3::frobenius_norm() const {
  double sum = 0.0;
  for (const auto& s : slices_) sum += s.squaredNorm();
  return std::sqrt(sum);
}

bool Tensor3::all_finite() const {
  return std::all_of(slices_.begin(), slices_.end(), [](const CMatrix& s) { return s.allFinite(); });
}

Tensor3& Tensor3::operator+=(const Tensor3& rhs) {
  require_same_shape(*this, rhs, "addition");
  for (std::size_t k = 0; k < slices_.size(); ++k) slices_[k] += rhs.slices_[k];
  return *this;
}

Tensor3& Tensor3::operator-=(const Tensor3& rhs) {
  require_same_shape(*this, rhs, "subtraction");
  for (std::size_t k = 0; k < slices_.size(); ++k) slices_[k] -= rhs.slices_[k];
  return *this;
}

Tensor3& Tensor3::operator*=(Complex s) {
  for (auto& slice : slices_) slice *= s;
  return *this;
}

bool operator==(const Tensor3& a, const Tensor3& b) {
  if (!a.same_shape(b)) return false;
  for (std::size_t k = 0; k < a.slices_.size(); ++k) {
    if (a.slices_[k] != b.slices_[k]) return false;
  }
  return true;
}

FourierSlices to_fourier(const Tensor3& a) {
  const Index m = a.rows();
  const Index n = a.cols();
  const Index p = a.tubes();
  FourierSlices f;
  if (p == 1) {
    f.slices = a.slices();
    return f;
  }
  f.slices.assign(static_cast<std::size_t>(p), CMatrix(m, n));
  Eigen::FFT<double> fft;
  std::vector<Complex> tube(static_cast<std::size_t>(p));
  std::vector<Complex> spectrum;
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) {
      for (Index k = 0; k < p; ++k) tube[static_cast<std::size_t>(k)] = a(i, j, k);
      fft.fwd(spectrum, tube);
      for (Index k = 0; k < p; ++k) f.slices[static_cast<std::size_t>(k)](i, j) = spectrum[static_cast<std::size_t>(k)];
    }
  }
  return f;
}

Tensor3 from_fourier(const FourierSlices& f) {
  const Index p = f.tubes();
  if (p == 0) throw Error(ErrorCode::kInvalidArgument, "no Fourier slices");
  if (p == 1) return Tensor3::from_slices(f.slices);
  const Index m = f.rows();
  const Index n = f.cols();
  Tensor3 t(m, n, p);
  Eigen::FFT<double> fft;
  std::vector<Complex> spectrum(static_cast<std::size_t>(p));
  std::vector<Complex> tube;
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) {
      for (Index k = 0; k < p; ++k) spectrum[static_cast<std::size_t>(k)] = f.slices[static_cast<std::size_t>(k)](i, j);
      fft.inv(tube, spectrum);
      for (Index k = 0; k < p; ++k) t(i, j, k) = tube[static_cast<std::size_t>(k)];
    }
  }
  return t;
}

CMatrix unfold(const Tensor3& a) {
  const Index m = a.rows();
  CMatrix out(m * a.tubes(), a.cols());
  for (Index k = 0; k < a.tubes(); ++k) out.middleRows(k * m, m) = a.slice(k);
  return out;
}

Tensor3 fold(const CMatrix& stacked, Index p) {
  if (p < 1 || stacked.rows() % p != 0) {
    throw Error(ErrorCode::kDimensionMismatch, "fold: row count is not a multiple of p");
  }
  const Index m = stacked.rows() / p;
  Tensor3 t(m, stacked.cols(), p);
  for (Index k = 0; k < p; ++k) t.slice(k) = stacked.middleRows(k * m, m);
  return t;
}

CMatrix bcirc(const Tensor3& a) {
  const Index m = a.rows();
  const Index n = a.cols();
  const Index p = a.tubes();
  CMatrix out(m * p, n * p);
  for (Index r = 0; r < p; ++r) {
    for (Index c = 0; c < p; ++c) {
      out.block(r * m, c * n, m, n) = a.slice(((r - c) % p + p) % p);
    }
  }
  return out;
}

Tensor3 bcirc_inv(const CMatrix& blocks, Index m, Index n, Index p) {
  if (p < 1 || blocks.rows() != m * p || blocks.cols() != n * p) {
    throw Error(ErrorCode::kDimensionMismatch, "bcirc_inv: matrix size does not match m, n, p");
  }
  Tensor3 t(m, n, p);
  for (Index k = 0; k < p; ++k) t.slice(k) = blocks.block(k * m, 0, m, n);
  const double tol = 1e-10 * std::max(blocks.norm(), 1e-300);
  double defect = 0.0;
  for (Index r = 0; r < p; ++r) {
    for (Index c = 0; c < p; ++c) {
      defect = std::max(defect, (blocks.block(r * m, c * n, m, n) - t.slice(((r - c) % p + p) % p)).norm());
    }
  }
  if (defect > tol) {
    throw Error(ErrorCode::kInvalidArgument, "bcirc_inv: matrix is not block circulant");
  }
  return t;
}

Tensor3 tprod(const Tensor3& a, const Tensor3& b) {
  if (a.cols() != b.rows() || a.tubes() != b.tubes()) {
    throw Error(ErrorCode::kDimensionMismatch, "tprod: expected m x n x p times n x s x p");
  }
  FourierSlices fa = to_fourier(a);
  const FourierSlices fb = to_fourier(b);
  for (std::size_t k = 0; k < fa.slices.size(); ++k) fa.slices[k] = fa.slices[k] * fb.slices[k];
  return from_fourier(fa);
}

Tensor3 conj_transpose(const Tensor3& a) {
  const Index p = a.tubes();
  Tensor3 t(a.cols(), a.rows(), p);
  // bcirc(A^H) = bcirc(A)^H: slice k of A^H is the adjoint of slice (p - k) mod p.
  for (Index k = 0; k < p; ++k) t.slice(k) = a.slice((p - k) % p).adjoint();
  return t;
}

Tensor3 t_inverse(const Tensor3& a, double tol) {
  require_frontal_square(a, "t_inverse");
  FourierSlices f = to_fourier(a);
  for (auto& s : f.slices) {
    Eigen::JacobiSVD<CMatrix> svd(s);
    const RVector& sv = svd.singularValues();
    const double smax = sv.size() ? sv(0) : 0.0;
    const double smin = sv.size() ? sv(sv.size() - 1) : 0.0;
    if (!(smin > 0.0) || smax / smin > 1.0 / tol) {
      throw Error(ErrorCode::kSingularTensor, "a Fourier slice is singular to working precision");
    }
    s = s.fullPivLu().inverse();
  }
  return from_fourier(f);
}

std::vector<Complex> t_eigenvalues(const Tensor3& a) {
  require_frontal_square(a, "t_eigenvalues");
  const FourierSlices f = to_fourier(a);
  std::vector<Complex> out;
  out.reserve(static_cast<std::size_t>(a.rows() * a.tubes()));
  for (const auto& s : f.slices) {
    Eigen::ComplexEigenSolver<CMatrix> es(s, false);
    std::vector<Complex> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    double scale = 0.0;
    for (const auto& z : ev) scale = std::max(scale, std::abs(z));
    // Quantised modulus keeps the ordering a strict weak order while treating
    // moduli equal to ~1e-10 relative as ties.
    const double quantum = 1e-10 * std::max(scale, 1e-300);
    std::sort(ev.begin(), ev.end(), [quantum](const Complex& x, const Complex& y) {
      const double qx = std::round(std::abs(x) / quantum);
      const double qy = std::round(std::abs(y) / quantum);
      if (qx != qy) return qx > qy;
      return std::arg(x) > std::arg(y);
    });
    out.insert(out.end(), ev.begin(), ev.end());
  }
  return out;
}

SectorialityMargin sectoriality_margin(const Tensor3& a, int grid_points) {
  require_frontal_square(a, "sectoriality_margin");
  const FourierSlices f = to_fourier(a);
  return max_rotation_margin(f.slices, grid_points);
}

}  // namespace tphase
