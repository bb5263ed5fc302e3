#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "tphase/phase.hpp"
#include "tphase/tensor.hpp"

namespace tphase {

/// Principal power A^alpha computed per Fourier slice. Requires A strictly
/// accretive unless alpha is +1 or -1.
Tensor3 t_power(const Tensor3& a, double alpha);

/// Geometric mean A # B per Fourier slice.
Tensor3 t_geomean(const Tensor3& a, const Tensor3& b);

/// ||X * A^{-1} * X - B||_F / max(||B||_F, 1e-300).
double riccati_residual(const Tensor3& x, const Tensor3& a, const Tensor3& b);

/// (X + Y) / 2.
Tensor3 arithmetic_mean(const Tensor3& x, const Tensor3& y);

bool is_t_hermitian(const Tensor3& x, double tol = 1e-10);

/// Real T-eigenvalues of a T-Hermitian tensor, sorted nonincreasing.
std::vector<double> hermitian_t_eigenvalues(const Tensor3& x);

struct MajorizationReport {
  std::vector<double> lhs;  ///< the majorized side
  std::vector<double> rhs;  ///< the majorizing side
  MajorizationResult result;
};

/// lambda(X + Y) < lambda_desc(X) + lambda_desc(Y), strong.
MajorizationReport check_kyfan_eig(const Tensor3& x, const Tensor3& y,
                                   double tol = kMajorizationTol);

/// lambda_desc(X + Y) - lambda_desc(X) < lambda_desc(Y), strong.
MajorizationReport check_lidskii_eig(const Tensor3& x, const Tensor3& y,
                                     double tol = kMajorizationTol);

struct GaugeCheck {
  GaugeSpec gauge;
  double mean_value = 0.0;   ///< gauge of phi(A # B)
  double bound = 0.0;        ///< (gauge phi(A) + gauge phi(B)) / 2
  bool holds = true;
};

struct PhaseMajorizationReport {
  MajorizationReport theorem;      ///< phi(A#B) < (phi(A) + phi(B)) / 2
  MajorizationReport square_root;  ///< 2 phi(A^{1/2}) < phi(A)
  std::vector<GaugeCheck> gauges;
  [[nodiscard]] bool holds() const;
};

/// Strong majorization of the geometric-mean phase bound, the gauge
/// subadditivity corollary (Ky-Fan 1..np and l_1 by default, plus `extra`),
/// and the square-root corollary.
PhaseMajorizationReport check_phase_majorization(const Tensor3& a, const Tensor3& b,
                                                 const std::vector<GaugeSpec>& extra = {},
                                                 double tol = kMajorizationTol);

struct MaximalElementWitness {
  Tensor3 x;                    ///< T_A^{-1} * T_B
  std::vector<double> achieved; ///< sorted phi((X^H * A * X) # B)
  std::vector<double> bound;    ///< (phi(A) + phi(B)) / 2
  /// Per-slice pairing: sorted union over Fourier slices of the slice-wise
  /// means of nonincreasing slice phases. This is what congruence by a
  /// tensor can reach.
  std::vector<double> slice_paired_bound;
  double deviation = 0.0;       ///< max |achieved - bound|
  double slice_deviation = 0.0; ///< max |achieved - slice_paired_bound|
  [[nodiscard]] bool attains_bound(double tol = 1e-8) const { return deviation <= tol; }
};

MaximalElementWitness maximal_element_witness(const Tensor3& a, const Tensor3& b);

struct ProbeSizes {
  Index max_n = 3;
  Index max_p = 3;
};

struct ProbeReport {
  std::uint64_t seed = 0;
  int trials = 0;
  double tol = kMajorizationTol;
  double max_violation = 0.0;
  int violations = 0;  ///< trials whose violation exceeded tol
  std::uint64_t worst_trial_seed = 0;
  int worst_trial = -1;
  Tensor3 worst_a;
  Tensor3 worst_b;
};

/// Samples random accretive pairs and measures how far
///   2 phi(A # B) - phi(A) < phi(B)
/// is from holding. Reports only; nothing here asserts the inequality.
ProbeReport probe_phase_lidskii(int trials, std::uint64_t seed, ProbeSizes sizes = {},
                                double tol = kMajorizationTol);

/// Largest prefix-sum excess of the left side over phi(B), or the total-sum
/// mismatch if larger; the inequality holds to tolerance t when this is <= t.
double phase_lidskii_violation(const Tensor3& a, const Tensor3& b);

}  // namespace tphase
