#include "tphase/random.hpp"

namespace tphase {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

CMatrix uniform_matrix(Index m, Index n, Rng& rng, bool real) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CMatrix out(m, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < m; ++i) {
      const double re = u(rng);
      const double im = real ? 0.0 : u(rng);
      out(i, j) = Complex(re, im);
    }
  }
  return out;
}

CMatrix gaussian_matrix(Index n, Rng& rng) {
  std::normal_distribution<double> g;
  CMatrix out(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      const double re = g(rng);
      const double im = g(rng);
      out(i, j) = Complex(re, im);
    }
  }
  return out;
}

}  // namespace

Tensor3 random_tensor(Index m, Index n, Index p, Rng& rng) {
  std::vector<CMatrix> s;
  for (Index k = 0; k < p; ++k) s.push_back(uniform_matrix(m, n, rng, false));
  return Tensor3::from_slices(std::move(s));
}

Tensor3 random_real_tensor(Index m, Index n, Index p, Rng& rng) {
  std::vector<CMatrix> s;
  for (Index k = 0; k < p; ++k) s.push_back(uniform_matrix(m, n, rng, true));
  return Tensor3::from_slices(std::move(s));
}

CMatrix random_unitary(Index n, Rng& rng) {
  Eigen::HouseholderQR<CMatrix> qr(gaussian_matrix(n, rng));
  CMatrix q = qr.householderQ();
  const CMatrix& r = qr.matrixQR();
  for (Index i = 0; i < n; ++i) {
    const double mag = std::abs(r(i, i));
    if (mag > 0.0) q.col(i) *= r(i, i) / mag;
  }
  return q;
}

CMatrix random_conditioned_matrix(Index n, double smin, double smax, Rng& rng) {
  std::uniform_real_distribution<double> u(smin, smax);
  RVector s(n);
  for (Index i = 0; i < n; ++i) s(i) = u(rng);
  const CMatrix left = random_unitary(n, rng);
  const CMatrix right = random_unitary(n, rng);
  return left * s.cast<Complex>().asDiagonal() * right.adjoint();
}

Tensor3 tensor_from_fourier(std::vector<CMatrix> slices) {
  FourierSlices f;
  f.slices = std::move(slices);
  return from_fourier(f);
}

Tensor3 random_nonsingular(Index n, Index p, Rng& rng) {
  std::vector<CMatrix> s;
  for (Index k = 0; k < p; ++k) s.push_back(random_conditioned_matrix(n, 0.5, 2.0, rng));
  return tensor_from_fourier(std::move(s));
}

Tensor3 random_sectorial(Index n, Index p, double lo, double hi, Rng& rng) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<CMatrix> s;
  for (Index k = 0; k < p; ++k) {
    const CMatrix t = random_conditioned_matrix(n, 0.5, 2.0, rng);
    CVector d(n);
    for (Index i = 0; i < n; ++i) d(i) = std::polar(1.0, u(rng));
    s.push_back(t.adjoint() * d.asDiagonal() * t);
  }
  return tensor_from_fourier(std::move(s));
}

Tensor3 random_accretive(Index n, Index p, Rng& rng) { return random_sectorial(n, p, -1.3, 1.3, rng); }

Tensor3 random_hermitian(Index n, Index p, Rng& rng) {
  std::vector<CMatrix> s;
  for (Index k = 0; k < p; ++k) {
    const CMatrix x = uniform_matrix(n, n, rng, false);
    s.push_back(0.5 * (x + x.adjoint()));
  }
  return tensor_from_fourier(std::move(s));
}

}  // namespace tphase
