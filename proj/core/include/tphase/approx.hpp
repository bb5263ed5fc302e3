#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tphase/geomean.hpp"
#include "tphase/phase.hpp"
#include "tphase/tensor.hpp"

namespace tphase {

/// Relative singular-value threshold for rank decisions.
inline constexpr double kRankTol = 1e-9;

struct TSVDFactors {
  Tensor3 U;  ///< m x m x p, unitary
  Tensor3 S;  ///< m x n x p, f-diagonal
  Tensor3 V;  ///< n x n x p, unitary
  /// T-singular values sorted nonincreasing (ties: slice, then in-slice).
  std::vector<double> sigma;
  std::vector<PhaseSource> sources;
  /// Per Fourier slice SVD factors (U_k, s_k, V_k).
  std::vector<CMatrix> slice_u;
  std::vector<RVector> slice_s;
  std::vector<CMatrix> slice_v;
};

TSVDFactors t_svd(const Tensor3& a);

/// Number of singular values above kRankTol * sigma_max of bcirc(X).
int t_rank(const Tensor3& x, double rel_tol = kRankTol);

struct RankTruncation {
  Tensor3 E;
  /// Psi(0, ..., 0, sigma_{r+1}, ...) for the supplied gauge.
  double optimal_value = 0.0;
  /// ||A - E||_F (tensor Frobenius norm, equal to sqrt(sum_{i>r} sigma_i^2 / p)).
  double frobenius_error = 0.0;
  GaugeSpec gauge;
  int r = 0;
};

/// Best rank-r approximation: keeps the r largest T-singular values.
RankTruncation truncate_rank(const Tensor3& a, int r, const GaugeSpec& gauge = GaugeSpec::lp(2.0));

struct HalfPhaseTruncation {
  Tensor3 E;  ///< half-phase truncation tensor
  int r = 0;
  std::vector<double> kept_phases;      ///< the r halved phases phi_i / 2
  std::vector<PhaseSource> kept_sources;
  std::vector<double> residual_phases;  ///< phi_{r+1}, ..., phi_{np}
  PhaseVector input_phases;
};

/// Builds E with phases phi_1/2, ..., phi_r/2 at the r largest canonical
/// phase positions so that E^{-1} * A * E^{-1} keeps phi_{r+1}, ..., phi_np.
/// A must lie in C[0, pi).
HalfPhaseTruncation half_phase_truncate(const Tensor3& a, int r);

/// E^{-1} * A * E^{-1}.
Tensor3 phase_residual(const Tensor3& a, const Tensor3& e);

/// Psi(phi_{r+1}(A), ..., phi_np(A), 0, ..., 0).
double optimal_tprank_value(const PhaseVector& phases, int r, const GaugeSpec& psi);
double optimal_tprank_value(const Tensor3& a, int r, const GaugeSpec& psi);

struct PhaseRankBridge {
  Tensor3 R;  ///< A - M = T^H * (D - I) * T
  Tensor3 M;  ///< T^H * T
  int rank_r = 0;
  int tprank_a = 0;
  double min_real_eig_m = 0.0;  ///< lambda_min(Re bcirc(M))
};

PhaseRankBridge phase_rank_bridge(const Tensor3& a);

struct SectorArithmeticReport {
  double alpha = 0.0;
  double beta = 0.0;
  bool sum_in_sector = false;  ///< (a): A + B in C[alpha, beta]
  bool window_met = false;     ///< eigenvalue-argument window of (b)
  std::optional<MajorizationResult> product_majorization;
  std::vector<double> product_arguments;  ///< angle lambda(A * B), sorted nonincreasing
  std::string note;
};

/// Sector-sum closure and the product-eigenvalue argument bound. The sector
/// [alpha, beta] is the hull of both phase ranges and must be narrower
/// than pi.
SectorArithmeticReport sector_arithmetic_checks(const Tensor3& a, const Tensor3& b);

struct CompetitorReport {
  int sampled = 0;
  int feasible = 0;
  /// min over feasible samples of (value - optimum); negative means a
  /// competitor beat the optimum.
  double min_gap = 0.0;
  std::uint64_t seed = 0;
};

/// Monte-Carlo lower-bound check of the low T-phase-rank optimum. Each
/// competitor is E = T^H * Lambda * T with at most r nonunit phases in
/// arbitrary positions; its value angle_psi(E^{-1} * A * E^{-1}) is compared to
/// the optimum for its own T-phase rank.
CompetitorReport sample_phase_competitors(const Tensor3& a, const std::vector<GaugeSpec>& gauges,
                                          int samples, std::uint64_t seed);

/// Random T-rank <= r competitors for the Schmidt-Mirsky optimum.
CompetitorReport sample_rank_competitors(const Tensor3& a, int r, const GaugeSpec& gauge,
                                         int samples, std::uint64_t seed);

}  // namespace tphase
