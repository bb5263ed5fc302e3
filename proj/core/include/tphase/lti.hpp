#pragma once

#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tphase/tensor.hpp"

namespace tphase {

/// Continuous-time tensor state-space model
///   dX/dt = A * X + B * U,   Y = C * X + D * U
/// with real m x m x p coefficient tensors.
struct StateSpaceTensor {
  Tensor3 A, B, C, D;
};

/// Real polynomial coefficients in descending powers: {2, 3, 4} is 2s^2 + 3s + 4.
using Polynomial = std::vector<double>;

struct RationalEntry {
  Polynomial num{0.0};
  Polynomial den{1.0};
};

/// p time-domain frontal slices of m x m real-rational proper functions;
/// slices[k][i][j] is entry (i, j) of slice k.
struct RationalSliceTF {
  std::vector<std::vector<std::vector<RationalEntry>>> slices;
};

/// Complex matrix realization (A, B, C, D) of one Fourier slice.
struct SliceRealization {
  CMatrix A, B, C, D;
};

/// Transfer tensor G(s) given either in state-space or rational-slice form.
class LtiSystem {
 public:
  explicit LtiSystem(StateSpaceTensor ss);
  explicit LtiSystem(RationalSliceTF tf);

  /// Static gain D, stored as constant rational slices.
  static LtiSystem static_gain(const Tensor3& d);

  [[nodiscard]] Index size() const noexcept { return m_; }
  [[nodiscard]] Index tubes() const noexcept { return p_; }
  [[nodiscard]] bool is_state_space() const noexcept {
    return std::holds_alternative<StateSpaceTensor>(repr_);
  }
  [[nodiscard]] const std::variant<StateSpaceTensor, RationalSliceTF>& repr() const noexcept {
    return repr_;
  }

  /// Fourier slices of G(s); throws kPoleAtFrequency when s is a pole.
  [[nodiscard]] std::vector<CMatrix> fourier_response(Complex s) const;
  [[nodiscard]] Tensor3 response(Complex s) const;
  /// Limit of G(s) as |s| -> infinity: D, or leading-coefficient ratios.
  [[nodiscard]] std::vector<CMatrix> fourier_response_at_infinity() const;

  /// Open-loop poles (T-eigenvalues of A, or denominator roots).
  [[nodiscard]] std::vector<Complex> poles() const;
  /// Every pole has real part below -1e-9 relative.
  [[nodiscard]] bool is_stable() const;

  /// One matrix realization per Fourier slice.
  [[nodiscard]] std::vector<SliceRealization> fourier_realization() const;

 private:
  std::variant<StateSpaceTensor, RationalSliceTF> repr_;
  Index m_ = 0;
  Index p_ = 0;
};

/// G(j omega) as a tensor; omega may be negative.
Tensor3 freq_response(const LtiSystem& g, double omega);

/// Log-spaced grid over [lo, hi] plus omega = 0 and omega = infinity.
struct FrequencyGrid {
  double lo = 1e-3;
  double hi = 1e3;
  int points = 400;
  bool refine = true;

  [[nodiscard]] std::vector<double> log_points() const;
  /// 0, the log points, then +infinity.
  [[nodiscard]] std::vector<double> all_points() const;
  [[nodiscard]] std::string describe() const;
};

struct HinfResult {
  double norm = 0.0;
  double peak_frequency = 0.0;  ///< may be +infinity
};

HinfResult hinf_norm(const LtiSystem& g, const FrequencyGrid& grid = {});

struct FrequencyPoint {
  double omega = 0.0;  ///< +infinity for the high-frequency limit
  double sigma_max = 0.0;
  double sigma_min = 0.0;
  bool sectorial = false;
  double phi_max = std::numeric_limits<double>::quiet_NaN();
  double phi_min = std::numeric_limits<double>::quiet_NaN();
};

struct PhaseEnvelope {
  std::vector<FrequencyPoint> points;  ///< omega = 0, the grid, omega = infinity
  double lower = 0.0;  ///< inf of phi_min over sectorial points (refined)
  double upper = 0.0;  ///< sup of phi_max over sectorial points (refined)
  double hinf = 0.0;
  [[nodiscard]] bool frequency_wise_sectorial() const;
  [[nodiscard]] double spread() const { return upper - lower; }
};

PhaseEnvelope phase_envelope(const LtiSystem& g, const FrequencyGrid& grid = {});

/// Canonical phase extremes of G(j omega); nullopt when not sectorial.
struct PhaseExtremes {
  double phi_max = 0.0;
  double phi_min = 0.0;
};
std::optional<PhaseExtremes> phase_extremes(const std::vector<CMatrix>& fourier_slices);

/// The Gang of Four
///   [ (I + H G)^{-1}      (I + H G)^{-1} H   ]
///   [ G (I + H G)^{-1}    G (I + H G)^{-1} H ]
/// as a 2m x 2m x p transfer object.
class GangOfFour {
 public:
  GangOfFour(LtiSystem g, LtiSystem h) : g_(std::move(g)), h_(std::move(h)) {}
  [[nodiscard]] std::vector<CMatrix> fourier_response(Complex s) const;
  [[nodiscard]] Tensor3 response(Complex s) const;
  [[nodiscard]] Tensor3 response(double omega) const { return response(Complex(0.0, omega)); }
  [[nodiscard]] const LtiSystem& plant() const noexcept { return g_; }
  [[nodiscard]] const LtiSystem& controller() const noexcept { return h_; }

 private:
  LtiSystem g_;
  LtiSystem h_;
};

/// Checks well-posedness (sigma_min(I + H G) > 1e-9 at every grid point and
/// at infinity) and returns the Gang of Four; throws kIllPosed otherwise.
GangOfFour gang_of_four(const LtiSystem& g, const LtiSystem& h, const FrequencyGrid& grid = {});

struct StabilityReport {
  bool stable = false;
  double spectral_abscissa = 0.0;
  std::vector<Complex> poles;
};

/// Closed-loop poles of the feedback interconnection, from the per-Fourier
/// slice realizations of G and H.
StabilityReport feedback_stable(const LtiSystem& g, const LtiSystem& h);

enum class Verdict { kCertified, kInconclusive, kAssumptionViolated };
std::string_view to_string(Verdict v);

struct Certificate {
  Verdict verdict = Verdict::kInconclusive;
  std::string condition;
  /// Small gain: the largest gain product seen. Small phase: the smallest of
  /// pi - (phi_max(G) + phi_max(H)) and (phi_min(G) + phi_min(H)) + pi.
  double worst_value = 0.0;
  double worst_frequency = 0.0;
  std::vector<double> offending_frequencies;
  std::string grid_note;
  std::optional<StabilityReport> loop;  ///< filled when certified
};

/// Small gain: sigma_max(G(jw)) sigma_max(H(jw)) < 1 on the refined grid.
Certificate small_gain_certificate(const LtiSystem& g, const LtiSystem& h,
                                   const FrequencyGrid& grid = {});

/// Small phase: phi_max(G) + phi_max(H) < pi and phi_min(G) + phi_min(H) > -pi
/// at every grid point in [0, infinity].
Certificate small_phase_certificate(const LtiSystem& g, const LtiSystem& h,
                                    const FrequencyGrid& grid = {});

/// CSV with header
///   omega_rad_s,sigma_max,sigma_min,phi_max_deg,phi_min_deg,sectorial
/// one row per frequency of `all_points()`, 17 significant digits.
std::string bode_csv(const LtiSystem& g, const FrequencyGrid& grid = {});
void bode_export(const LtiSystem& g, const FrequencyGrid& grid, const std::filesystem::path& path);

}  // namespace tphase
