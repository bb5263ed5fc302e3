// Independent reference computations for the tests. Nothing here calls the
// Fourier-domain code paths of the library; everything works on dense
// block-circulant matrices or on closed forms.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "tphase/tensor.hpp"

namespace oracle {

using tphase::CMatrix;
using tphase::Complex;
using tphase::Index;
using tphase::Tensor3;

inline constexpr double kPi = std::numbers::pi;

// Block (r, c) = A^((r - c) mod p), built straight from the frontal slices.
inline CMatrix dense_bcirc(const Tensor3& a) {
  const Index m = a.rows(), n = a.cols(), p = a.tubes();
  CMatrix out(m * p, n * p);
  for (Index r = 0; r < p; ++r)
    for (Index c = 0; c < p; ++c) out.block(r * m, c * n, m, n) = a.slice(((r - c) % p + p) % p);
  return out;
}

inline CMatrix dense_unfold(const Tensor3& a) {
  CMatrix out(a.rows() * a.tubes(), a.cols());
  for (Index k = 0; k < a.tubes(); ++k) out.middleRows(k * a.rows(), a.rows()) = a.slice(k);
  return out;
}

inline Tensor3 dense_fold(const CMatrix& s, Index p) {
  const Index m = s.rows() / p;
  Tensor3 t(m, s.cols(), p);
  for (Index k = 0; k < p; ++k) t.slice(k) = s.middleRows(k * m, m);
  return t;
}

// First block column of a block-circulant matrix read back as a tensor.
inline Tensor3 tensor_of_bcirc(const CMatrix& b, Index m, Index n, Index p) {
  Tensor3 t(m, n, p);
  for (Index k = 0; k < p; ++k) t.slice(k) = b.block(k * m, 0, m, n);
  return t;
}

inline Tensor3 dense_tprod(const Tensor3& a, const Tensor3& b) {
  return dense_fold(dense_bcirc(a) * dense_unfold(b), a.tubes());
}

inline double rel_err(const CMatrix& x, const CMatrix& ref) {
  return (x - ref).norm() / std::max(ref.norm(), 1e-300);
}

inline double rel_err(const Tensor3& x, const Tensor3& ref) {
  return (x - ref).frobenius_norm() / std::max(ref.frobenius_norm(), 1e-300);
}

// Unitary DFT matrix F_p[j, k] = exp(-2 pi i jk / p) / sqrt(p).
inline CMatrix dft(Index p) {
  CMatrix f(p, p);
  for (Index j = 0; j < p; ++j)
    for (Index k = 0; k < p; ++k)
      f(j, k) = std::polar(1.0 / std::sqrt(static_cast<double>(p)), -2.0 * kPi * static_cast<double>(j * k) / static_cast<double>(p));
  return f;
}

inline CMatrix kron_identity(const CMatrix& f, Index m) {
  CMatrix out = CMatrix::Zero(f.rows() * m, f.cols() * m);
  for (Index i = 0; i < f.rows(); ++i)
    for (Index j = 0; j < f.cols(); ++j) out.block(i * m, j * m, m, m) = f(i, j) * CMatrix::Identity(m, m);
  return out;
}

// Dunford-Taylor integral (1 / 2 pi i) \oint z^alpha (zI - M)^{-1} dz on the
// circle |z - center| = radius, trapezoid rule. The circle must enclose the
// spectrum and stay clear of (-inf, 0].
inline CMatrix contour_power(const CMatrix& m, double alpha, Complex center, double radius, int nodes = 512) {
  const Index n = m.rows();
  CMatrix acc = CMatrix::Zero(n, n);
  for (int k = 0; k < nodes; ++k) {
    const double t = 2.0 * kPi * (k + 0.5) / nodes;
    const Complex e = std::polar(1.0, t);
    const Complex z = center + radius * e;
    const Complex dz = Complex(0.0, 1.0) * radius * e * (2.0 * kPi / nodes);
    const CMatrix res = (z * CMatrix::Identity(n, n) - m).inverse();
    acc += std::pow(z, alpha) * dz * res;
  }
  return acc / Complex(0.0, 2.0 * kPi);
}

// max over a uniform theta grid of lambda_min of the Hermitian part of
// e^{-i theta} M, evaluated densely.
inline double theta_grid_margin(const CMatrix& m, int grid = 720) {
  double best = -1e300;
  for (int i = 0; i < grid; ++i) {
    const double th = -kPi + 2.0 * kPi * (i + 1) / grid;
    const CMatrix r = std::polar(1.0, -th) * m;
    const CMatrix h = 0.5 * (r + r.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
    best = std::max(best, es.eigenvalues().minCoeff());
  }
  return best;
}

// Largest distance in an optimal greedy pairing of two equal-size multisets.
inline double multiset_distance(std::vector<Complex> a, std::vector<Complex> b) {
  if (a.size() != b.size()) return 1e300;
  double worst = 0.0;
  std::vector<bool> used(b.size(), false);
  for (const auto& x : a) {
    double best = 1e300;
    std::size_t at = 0;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (!used[j] && std::abs(x - b[j]) < best) {
        best = std::abs(x - b[j]);
        at = j;
      }
    }
    used[at] = true;
    worst = std::max(worst, best);
  }
  return worst;
}

inline std::vector<Complex> dense_eigenvalues(const CMatrix& m) {
  Eigen::ComplexEigenSolver<CMatrix> es(m, false);
  std::vector<Complex> v(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  return v;
}

inline std::vector<double> dense_singular_values(const CMatrix& m) {
  Eigen::JacobiSVD<CMatrix> svd(m);
  const auto& s = svd.singularValues();
  return {s.data(), s.data() + s.size()};
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return 1e300;
  double w = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) w = std::max(w, std::abs(a[i] - b[i]));
  return w;
}

inline std::vector<double> sorted_desc(std::vector<double> v) {
  std::sort(v.begin(), v.end(), std::greater<>());
  return v;
}

// Prefix-sum dominance of sorted x over sorted y, written out longhand.
inline bool weakly_majorizes(std::vector<double> x, std::vector<double> y, double tol) {
  x = sorted_desc(x);
  y = sorted_desc(y);
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    if (sy > sx + tol) return false;
  }
  return true;
}

// Phases of a sectorial matrix M = T^H D T from the eigenvalues of
// M^{-H} M = T^{-1} D^2 T, halved. Valid when all phases lie in (-pi/2, pi/2).
inline std::vector<double> accretive_phases(const CMatrix& m) {
  const CMatrix q = m.adjoint().partialPivLu().solve(m);
  std::vector<double> out;
  for (const Complex& z : dense_eigenvalues(q)) out.push_back(0.5 * std::arg(z));
  return sorted_desc(out);
}

// Largest prefix-sum excess of sorted x over sorted y, or the total mismatch.
inline double strong_majorization_excess(std::vector<double> x, std::vector<double> y) {
  x = sorted_desc(x);
  y = sorted_desc(y);
  double sx = 0.0, sy = 0.0, worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    worst = std::max(worst, sx - sy);
  }
  return std::max(worst, std::abs(sx - sy));
}

}  // namespace oracle
