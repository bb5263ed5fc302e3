#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tphase/matrix_kernels.hpp"
#include "tphase/tensor.hpp"

namespace tphase {

/// Absolute threshold below which a canonical phase counts as zero.
inline constexpr double kPhaseZeroTol = 1e-10;

/// Where a globally sorted phase came from.
struct PhaseSource {
  Index slice = 0;     ///< Fourier slice index
  Index in_slice = 0;  ///< position within that slice's nonincreasing phases
  friend bool operator==(const PhaseSource&, const PhaseSource&) = default;
};

/// Canonical phases sorted nonincreasing; ties broken by slice index, then
/// in-slice index.
struct PhaseVector {
  std::vector<double> values;
  std::vector<PhaseSource> sources;

  [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
  [[nodiscard]] double max() const { return values.front(); }
  [[nodiscard]] double min() const { return values.back(); }
  [[nodiscard]] double spread() const { return values.empty() ? 0.0 : max() - min(); }
  /// values[i], zero past the end.
  [[nodiscard]] double at_padded(std::size_t i) const { return i < values.size() ? values[i] : 0.0; }
};

/// Sectorial decomposition of a tensor carried per Fourier slice:
/// A_k = T_k^H diag(exp(i theta_k)) T_k, with one common rotation gamma.
struct SectorialFactorization {
  std::vector<CMatrix> factors;   ///< T_k, Fourier domain
  std::vector<RVector> slice_phases;
  double gamma = 0.0;
  PhaseVector phases;

  /// The nonsingular tensor T with A = T^H * D * T.
  [[nodiscard]] Tensor3 factor_tensor() const;
  /// The diagonal-unitary tensor D.
  [[nodiscard]] Tensor3 diagonal_tensor() const;
};

SectorialFactorization sectorial_decompose(const Tensor3& a);
/// Same, starting from the Fourier slices of a frontal-square tensor.
SectorialFactorization sectorial_decompose(const FourierSlices& f);
PhaseVector canonical_phases(const Tensor3& a);

/// Number of canonical phases with |phi| > kPhaseZeroTol.
int tprank(const PhaseVector& phases);
int tprank(const Tensor3& a);

/// Symmetric gauge functions: Ky-Fan k, l_p (p in [1, inf]) and a weighted
/// sorted-|x| dot product with nonincreasing nonnegative weights.
class GaugeSpec {
 public:
  enum class Kind { kKyFan, kLp, kWeighted };

  static GaugeSpec ky_fan(int k);
  static GaugeSpec lp(double p);
  static GaugeSpec linf() { return lp(std::numeric_limits<double>::infinity()); }
  static GaugeSpec weighted(std::vector<double> weights);

  /// Accepts "kyfan:K", "lp:P", "l1", "l2", "fro", "linf", "weighted:w1,w2,...".
  static GaugeSpec parse(const std::string& text);
  /// Canonical spelling; parse(to_string()) reproduces the gauge.
  [[nodiscard]] std::string to_string() const;

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] int k() const noexcept { return k_; }
  [[nodiscard]] double p() const noexcept { return p_; }
  [[nodiscard]] const std::vector<double>& weights() const noexcept { return weights_; }

  friend bool operator==(const GaugeSpec&, const GaugeSpec&) = default;

 private:
  GaugeSpec() = default;
  Kind kind_ = Kind::kLp;
  int k_ = 0;
  double p_ = 2.0;
  std::vector<double> weights_;
};

/// Vectors shorter than the gauge needs are zero-extended.
double gauge_eval(const GaugeSpec& psi, std::span<const double> x);
double phase_gauge(const Tensor3& a, const GaugeSpec& psi);

enum class MajorizationMode { kWeak, kStrong };

struct MajorizationResult {
  bool holds = true;
  /// First prefix (1-based count) where the dominance fails; 0 for the total
  /// sum check in strong mode.
  std::optional<std::size_t> violated_prefix;
  /// max over prefixes of (prefix_y - prefix_x), plus |sum x - sum y| in
  /// strong mode; <= tol when `holds`.
  double max_violation = 0.0;
};

inline constexpr double kMajorizationTol = 1e-9;

/// Does x majorize y? Sorted-descending prefix sums of x must dominate those
/// of y; strong mode additionally requires equal totals.
MajorizationResult majorizes(std::span<const double> x, std::span<const double> y,
                             MajorizationMode mode, double tol = kMajorizationTol);

struct SectorClass {
  double alpha = 0.0;  ///< smallest canonical phase
  double beta = 0.0;   ///< largest canonical phase
  bool quasi_sectorial = false;
  bool semi_sectorial = false;
  bool accretive = false;
  bool negative_imaginary = false;
  /// Inside C[0, pi): every phase in [0, pi).
  bool positive_imaginary = false;
};

SectorClass classify_sector(const PhaseVector& phases);
SectorClass classify_sector(const Tensor3& a);

}  // namespace tphase
