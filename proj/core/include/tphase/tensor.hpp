#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tphase/errors.hpp"

namespace tphase {

using Complex = std::complex<double>;
using Index = Eigen::Index;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Dense complex m x n x p tensor stored as p frontal slices.
///
/// Frontal slice k (0-based here) is the m x n matrix A^(k+1). Real data is
/// stored with zero imaginary parts; there is no separate real type.
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(Index m, Index n, Index p);

  /// Builds a tensor from frontal slices; all slices must share one shape and
  /// every entry must be finite.
  static Tensor3 from_slices(std::vector<CMatrix> slices);
  static Tensor3 identity(Index n, Index p);
  static Tensor3 zeros(Index m, Index n, Index p) { return Tensor3(m, n, p); }

  [[nodiscard]] Index rows() const noexcept { return m_; }
  [[nodiscard]] Index cols() const noexcept { return n_; }
  [[nodiscard]] Index tubes() const noexcept { return static_cast<Index>(slices_.size()); }
  [[nodiscard]] bool frontal_square() const noexcept { return m_ == n_; }

  [[nodiscard]] const CMatrix& slice(Index k) const { return slices_[static_cast<std::size_t>(k)]; }
  CMatrix& slice(Index k) { return slices_[static_cast<std::size_t>(k)]; }
  [[nodiscard]] const std::vector<CMatrix>& slices() const noexcept { return slices_; }

  Complex& operator()(Index i, Index j, Index k) { return slice(k)(i, j); }
  const Complex& operator()(Index i, Index j, Index k) const { return slice(k)(i, j); }

  [[nodiscard]] double frobenius_norm() const;
  [[nodiscard]] bool all_finite() const;
  [[nodiscard]] bool same_shape(const Tensor3& other) const noexcept {
    return m_ == other.m_ && n_ == other.n_ && tubes() == other.tubes();
  }

  Tensor3& operator+=(const Tensor3& rhs);
  Tensor3& operator-=(const Tensor3& rhs);
  Tensor3& operator*=(Complex s);

  friend Tensor3 operator+(Tensor3 lhs, const Tensor3& rhs) { return lhs += rhs; }
  friend Tensor3 operator-(Tensor3 lhs, const Tensor3& rhs) { return lhs -= rhs; }
  friend Tensor3 operator*(Tensor3 lhs, Complex s) { return lhs *= s; }
  friend Tensor3 operator*(Complex s, Tensor3 rhs) { return rhs *= s; }
  friend Tensor3 operator-(Tensor3 t) { return t *= Complex(-1.0); }
  friend bool operator==(const Tensor3& a, const Tensor3& b);

 private:
  Index m_ = 0;
  Index n_ = 0;
  std::vector<CMatrix> slices_;
};

/// Frontal slices of the DFT along the tube mode. Slice k is
/// sum_j A^(j) exp(-2 pi i jk / p), so that
///   bcirc(A) = (F_p^H (x) I_m) diag(slices) (F_p (x) I_n)
/// with the unitary F_p.
struct FourierSlices {
  std::vector<CMatrix> slices;

  [[nodiscard]] Index tubes() const noexcept { return static_cast<Index>(slices.size()); }
  [[nodiscard]] Index rows() const { return slices.empty() ? 0 : slices.front().rows(); }
  [[nodiscard]] Index cols() const { return slices.empty() ? 0 : slices.front().cols(); }
};

FourierSlices to_fourier(const Tensor3& a);
Tensor3 from_fourier(const FourierSlices& f);

/// Stacks the frontal slices into an (mp x n) matrix.
CMatrix unfold(const Tensor3& a);
Tensor3 fold(const CMatrix& stacked, Index p);

/// Block (r, c) of the result is A^((r - c mod p) + 1).
CMatrix bcirc(const Tensor3& a);
/// Inverse of `bcirc`; rejects matrices that are not block circulant within
/// 1e-10 relative tolerance.
Tensor3 bcirc_inv(const CMatrix& blocks, Index m, Index n, Index p);

/// T-product, evaluated slice-wise in the Fourier domain.
Tensor3 tprod(const Tensor3& a, const Tensor3& b);
Tensor3 conj_transpose(const Tensor3& a);

inline constexpr double kDefaultInverseTol = 1e-12;

/// T-inverse. Throws kSingularTensor when a Fourier slice has condition
/// number above 1/tol.
Tensor3 t_inverse(const Tensor3& a, double tol = kDefaultInverseTol);

/// Eigenvalues of bcirc(A) ordered by Fourier slice, then by nonincreasing
/// modulus, then by nonincreasing argument.
std::vector<Complex> t_eigenvalues(const Tensor3& a);

inline constexpr int kDefaultRotationGrid = 720;

struct SectorialityMargin {
  double gamma = 0.0;   ///< rotation angle maximising the margin, in (-pi, pi]
  double margin = 0.0;  ///< max over theta of lambda_min(Re(e^{-i theta} bcirc(A)))
  double scale = 0.0;   ///< ||bcirc(A)||_2
  [[nodiscard]] bool sectorial() const noexcept { return margin > 1e-10 * scale; }
};

/// Rotation search over theta: a uniform grid followed by golden-section
/// refinement around the best grid point. Runs on the Fourier slices.
SectorialityMargin sectoriality_margin(const Tensor3& a, int grid_points = kDefaultRotationGrid);

}  // namespace tphase
