#include "tphase/phase.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace tphase {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> sorted_abs_desc(std::span<const double> x) {
  std::vector<double> a(x.size());
  std::transform(x.begin(), x.end(), a.begin(), [](double v) { return std::abs(v); });
  std::sort(a.begin(), a.end(), std::greater<>());
  return a;
}

double parse_number(const std::string& s, const std::string& whole) {
  if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw Error(ErrorCode::kFormat, "bad number in gauge spec '" + whole + "'");
  }
  if (used != s.size()) throw Error(ErrorCode::kFormat, "bad number in gauge spec '" + whole + "'");
  return v;
}

std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

SectorialFactorization sectorial_decompose(const Tensor3& a) {
  if (!a.frontal_square()) throw Error(ErrorCode::kDimensionMismatch, "canonical phases need a frontal-square tensor");
  return sectorial_decompose(to_fourier(a));
}

SectorialFactorization sectorial_decompose(const FourierSlices& f) {
  if (f.rows() != f.cols()) throw Error(ErrorCode::kDimensionMismatch, "canonical phases need square Fourier slices");
  const SectorialityMargin sm = max_rotation_margin(f.slices);
  if (!sm.sectorial()) throw Error(ErrorCode::kNotSectorial, "0 lies in the numerical range of bcirc(A)");

  SectorialFactorization out;
  out.gamma = sm.gamma;
  struct Entry {
    double value;
    PhaseSource src;
  };
  std::vector<Entry> all;
  for (Index k = 0; k < f.tubes(); ++k) {
    SectorialFactorizationM m = sectorial_decompose_matrix(f.slices[static_cast<std::size_t>(k)], sm.gamma);
    for (Index i = 0; i < m.phases.size(); ++i) all.push_back({m.phases(i), {k, i}});
    out.factors.push_back(std::move(m.T));
    out.slice_phases.push_back(std::move(m.phases));
  }
  std::stable_sort(all.begin(), all.end(), [](const Entry& x, const Entry& y) {
    if (x.value != y.value) return x.value > y.value;
    if (x.src.slice != y.src.slice) return x.src.slice < y.src.slice;
    return x.src.in_slice < y.src.in_slice;
  });
  for (const auto& e : all) {
    out.phases.values.push_back(e.value);
    out.phases.sources.push_back(e.src);
  }
  if (!all.empty() && out.phases.spread() >= kPi - 1e-12) {
    throw Error(ErrorCode::kBranchSpread, "canonical phases spread over pi or more");
  }
  return out;
}

Tensor3 SectorialFactorization::factor_tensor() const { return from_fourier({factors}); }

Tensor3 SectorialFactorization::diagonal_tensor() const {
  FourierSlices f;
  for (const auto& ph : slice_phases) {
    CVector d(ph.size());
    for (Index i = 0; i < ph.size(); ++i) d(i) = std::polar(1.0, ph(i));
    f.slices.push_back(d.asDiagonal().toDenseMatrix());
  }
  return from_fourier(f);
}

PhaseVector canonical_phases(const Tensor3& a) { return sectorial_decompose(a).phases; }

int tprank(const PhaseVector& phases) {
  return static_cast<int>(std::count_if(phases.values.begin(), phases.values.end(),
                                        [](double v) { return std::abs(v) > kPhaseZeroTol; }));
}

int tprank(const Tensor3& a) { return tprank(canonical_phases(a)); }

GaugeSpec GaugeSpec::ky_fan(int k) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "Ky-Fan index must be >= 1");
  GaugeSpec g;
  g.kind_ = Kind::kKyFan;
  g.k_ = k;
  return g;
}

GaugeSpec GaugeSpec::lp(double p) {
  if (!(p >= 1.0)) throw Error(ErrorCode::kInvalidArgument, "l_p gauge needs p >= 1");
  GaugeSpec g;
  g.kind_ = Kind::kLp;
  g.p_ = p;
  return g;
}

GaugeSpec GaugeSpec::weighted(std::vector<double> weights) {
  if (weights.empty()) throw Error(ErrorCode::kInvalidArgument, "weighted gauge needs weights");
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!std::isfinite(weights[i]) || weights[i] < 0.0 || (i > 0 && weights[i] > weights[i - 1])) {
      throw Error(ErrorCode::kInvalidArgument, "weights must be finite, nonnegative and nonincreasing");
    }
  }
  if (weights.front() <= 0.0) throw Error(ErrorCode::kInvalidArgument, "weighted gauge needs a positive leading weight");
  GaugeSpec g;
  g.kind_ = Kind::kWeighted;
  g.weights_ = std::move(weights);
  return g;
}

GaugeSpec GaugeSpec::parse(const std::string& text) {
  if (text == "l1") return lp(1.0);
  if (text == "l2" || text == "fro") return lp(2.0);
  if (text == "linf") return linf();
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw Error(ErrorCode::kFormat, "unknown gauge '" + text + "'");
  const std::string head = text.substr(0, colon);
  const std::string tail = text.substr(colon + 1);
  try {
    if (head == "kyfan") {
      const double k = parse_number(tail, text);
      if (k != std::floor(k)) throw Error(ErrorCode::kFormat, "Ky-Fan index must be an integer");
      return ky_fan(static_cast<int>(k));
    }
    if (head == "lp") return lp(parse_number(tail, text));
    if (head == "weighted") {
      std::vector<double> w;
      std::stringstream ss(tail);
      std::string item;
      while (std::getline(ss, item, ',')) w.push_back(parse_number(item, text));
      return weighted(std::move(w));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidArgument) throw Error(ErrorCode::kFormat, e.what());
    throw;
  }
  throw Error(ErrorCode::kFormat, "unknown gauge '" + text + "'");
}

std::string GaugeSpec::to_string() const {
  switch (kind_) {
    case Kind::kKyFan:
      return "kyfan:" + std::to_string(k_);
    case Kind::kLp:
      return std::isinf(p_) ? "linf" : "lp:" + shortest(p_);
    case Kind::kWeighted: {
      std::string s = "weighted:";
      for (std::size_t i = 0; i < weights_.size(); ++i) s += (i ? "," : "") + shortest(weights_[i]);
      return s;
    }
  }
  return {};
}

double gauge_eval(const GaugeSpec& psi, std::span<const double> x) {
  const std::vector<double> a = sorted_abs_desc(x);
  switch (psi.kind()) {
    case GaugeSpec::Kind::kKyFan: {
      const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(psi.k()), a.size());
      return std::accumulate(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(k), 0.0);
    }
    case GaugeSpec::Kind::kLp: {
      if (a.empty()) return 0.0;
      if (std::isinf(psi.p())) return a.front();
      const double scale = a.front();
      if (scale == 0.0) return 0.0;
      double sum = 0.0;
      for (double v : a) sum += std::pow(v / scale, psi.p());
      return scale * std::pow(sum, 1.0 / psi.p());
    }
    case GaugeSpec::Kind::kWeighted: {
      double sum = 0.0;
      const std::size_t k = std::min(psi.weights().size(), a.size());
      for (std::size_t i = 0; i < k; ++i) sum += psi.weights()[i] * a[i];
      return sum;
    }
  }
  return 0.0;
}

double phase_gauge(const Tensor3& a, const GaugeSpec& psi) {
  return gauge_eval(psi, canonical_phases(a).values);
}

MajorizationResult majorizes(std::span<const double> x, std::span<const double> y,
                             MajorizationMode mode, double tol) {
  if (x.size() != y.size()) throw Error(ErrorCode::kDimensionMismatch, "majorization needs equal lengths");
  std::vector<double> xs(x.begin(), x.end());
  std::vector<double> ys(y.begin(), y.end());
  std::sort(xs.begin(), xs.end(), std::greater<>());
  std::sort(ys.begin(), ys.end(), std::greater<>());

  MajorizationResult r;
  r.max_violation = -std::numeric_limits<double>::infinity();
  double px = 0.0;
  double py = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    px += xs[i];
    py += ys[i];
    const double v = py - px;
    r.max_violation = std::max(r.max_violation, v);
    if (v > tol && r.holds) {
      r.holds = false;
      r.violated_prefix = i + 1;
    }
  }
  if (xs.empty()) r.max_violation = 0.0;
  if (mode == MajorizationMode::kStrong) {
    const double gap = std::abs(px - py);
    r.max_violation = std::max(r.max_violation, gap);
    if (gap > tol && r.holds) {
      r.holds = false;
      r.violated_prefix = 0;
    }
  }
  return r;
}

SectorClass classify_sector(const PhaseVector& phases) {
  SectorClass c;
  if (phases.values.empty()) return c;
  c.alpha = phases.min();
  c.beta = phases.max();
  const double width = c.beta - c.alpha;
  c.quasi_sectorial = width < kPi;
  c.semi_sectorial = width <= kPi;
  c.accretive = c.alpha > -kPi / 2 && c.beta < kPi / 2;
  c.negative_imaginary = c.alpha > -kPi && c.beta <= kPhaseZeroTol;
  c.positive_imaginary = c.alpha >= -kPhaseZeroTol && c.beta < kPi;
  return c;
}

SectorClass classify_sector(const Tensor3& a) { return classify_sector(canonical_phases(a)); }

}  // namespace tphase
