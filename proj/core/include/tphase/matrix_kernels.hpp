#pragma once

#include <optional>
#include <span>

#include "tphase/tensor.hpp"

namespace tphase {

/// Relative tolerance for every positive-definiteness decision:
/// lambda_min > kPdTol * ||.||_2.
inline constexpr double kPdTol = 1e-10;

/// M = T^H diag(exp(i phases)) T, phases nonincreasing and inside (-pi, pi].
struct SectorialFactorizationM {
  CMatrix T;
  RVector phases;
  double gamma = 0.0;
};

/// Hermitian part (M + M^H) / 2.
CMatrix hermitian_part(const CMatrix& m);
/// Skew part divided by i, (M - M^H) / (2i); Hermitian.
CMatrix skew_hermitian_part(const CMatrix& m);
double lambda_min_hermitian(const CMatrix& h);
double spectral_norm(const CMatrix& m);

/// Joint rotation search over a set of square matrices:
///   maximise min_k lambda_min(Re(e^{-i theta} M_k)).
SectorialityMargin max_rotation_margin(std::span<const CMatrix> mats,
                                       int grid_points = kDefaultRotationGrid);

/// Rotate-Cholesky-Hermitian-eigen construction. When `gamma` is given it is
/// used as the rotation (it must make Re(e^{-i gamma} M) positive definite);
/// otherwise the rotation search picks it.
SectorialFactorizationM sectorial_decompose_matrix(const CMatrix& m,
                                                   std::optional<double> gamma = std::nullopt);

/// Principal power z^alpha = r^alpha e^{i alpha theta}, theta in (-pi, pi).
/// Diagonalisation path when the eigenvector condition number is below 1e6,
/// Schur-based path otherwise.
CMatrix principal_power_matrix(const CMatrix& m, double alpha);

/// Principal square root of an upper-triangular matrix by the column
/// recurrence on the Schur form.
CMatrix sqrt_upper_triangular(const CMatrix& t);

/// True when the numerical range lies in the open right half-plane.
bool is_accretive(const CMatrix& m);

/// A^{1/2} (A^{-1/2} B A^{-1/2})^{1/2} A^{1/2} for accretive A, B.
CMatrix matrix_geomean(const CMatrix& a, const CMatrix& b);

inline constexpr int kDefaultQuadratureNodes = 2048;

/// Geometric mean via the inverse-integral representation
///   (A # B)^{-1} = (2/pi) int_0^inf (tA + B/t)^{-1} dt/t,
/// using t = e^u and composite Gauss-Legendre on [-U, U]. The node count is
/// doubled once to confirm convergence to 1e-6 relative.
CMatrix matrix_geomean_integral_oracle(const CMatrix& a, const CMatrix& b,
                                       int nodes = kDefaultQuadratureNodes);

}  // namespace tphase
