#include "tphase/lti.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <stdexcept>

#include <unsupported/Eigen/Polynomials>

#include "tphase/io.hpp"
#include "tphase/matrix_kernels.hpp"
#include "tphase/phase.hpp"

namespace tphase {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kStabilityMargin = 1e-9;
constexpr double kWellPosedTol = 1e-9;

Polynomial trim(Polynomial p) {
  auto first = std::find_if(p.begin(), p.end(), [](double c) { return c != 0.0; });
  p.erase(p.begin(), first);
  if (p.empty()) p.push_back(0.0);
  return p;
}

int degree(const Polynomial& p) { return static_cast<int>(p.size()) - 1; }

bool is_zero(const Polynomial& p) { return p.size() == 1 && p[0] == 0.0; }

Complex polyval(const Polynomial& p, Complex s) {
  Complex acc = 0.0;
  for (double c : p) acc = acc * s + c;
  return acc;
}

double polyval_scale(const Polynomial& p, double r) {
  double acc = 0.0;
  for (double c : p) acc = acc * r + std::abs(c);
  return acc;
}

std::vector<Complex> roots(const Polynomial& p) {
  const int d = degree(p);
  if (d <= 0) return {};
  if (d == 1) return {Complex(-p[1] / p[0], 0.0)};
  Eigen::VectorXd asc(d + 1);
  for (int i = 0; i <= d; ++i) asc(i) = p[static_cast<std::size_t>(d - i)];
  Eigen::PolynomialSolver<double, Eigen::Dynamic> solver(asc);
  const auto& r = solver.roots();
  return {r.data(), r.data() + r.size()};
}

// A monic denominator paired with the strictly proper remainder of num / den
// and the feedthrough term.
struct ProperSplit {
  Polynomial monic_den;  // leading 1 dropped: s^n + a[0] s^{n-1} + ... + a[n-1]
  Polynomial rem;        // length n, descending, degree < n
  double direct = 0.0;
};

ProperSplit split_proper(const RationalEntry& e) {
  const double lead = e.den.front();
  const int n = degree(e.den);
  ProperSplit out;
  Polynomial num(static_cast<std::size_t>(n + 1), 0.0);
  const int dn = degree(e.num);
  for (int i = 0; i <= dn; ++i) num[static_cast<std::size_t>(n - dn + i)] = e.num[static_cast<std::size_t>(i)];
  out.direct = num[0] / lead;
  for (int i = 1; i <= n; ++i) {
    out.monic_den.push_back(e.den[static_cast<std::size_t>(i)] / lead);
    out.rem.push_back(num[static_cast<std::size_t>(i)] / lead - out.direct * e.den[static_cast<std::size_t>(i)] / lead);
  }
  return out;
}

double sigma_max(const std::vector<CMatrix>& slices) {
  double v = 0.0;
  for (const auto& s : slices) v = std::max(v, spectral_norm(s));
  return v;
}

std::vector<CMatrix> response_at(const LtiSystem& g, double omega) {
  if (std::isinf(omega)) return g.fourier_response_at_infinity();
  return g.fourier_response(Complex(0.0, omega));
}

// Golden-section maximisation of f over log10(omega) in [lo, hi].
std::pair<double, double> golden_max_log(const std::function<double(double)>& f, double lo, double hi) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = std::log10(lo);
  double b = std::log10(hi);
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(std::pow(10.0, x1));
  double f2 = f(std::pow(10.0, x2));
  for (int it = 0; it < 60 && b - a > 1e-10; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(std::pow(10.0, x2));
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(std::pow(10.0, x1));
    }
  }
  return f1 >= f2 ? std::pair{std::pow(10.0, x1), f1} : std::pair{std::pow(10.0, x2), f2};
}

// Scans all_points() for the maximum of f and, when enabled and the maximiser
// is an interior log point, refines between its neighbours.
std::pair<double, double> grid_max(const FrequencyGrid& grid, const std::function<double(double)>& f) {
  const std::vector<double> pts = grid.all_points();
  std::size_t best = 0;
  double best_v = -kInf;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double v = f(pts[i]);
    if (v > best_v) {
      best_v = v;
      best = i;
    }
  }
  double best_w = pts[best];
  if (grid.refine && best >= 2 && best + 2 < pts.size()) {
    const auto [w, v] = golden_max_log(f, pts[best - 1], pts[best + 1]);
    if (v > best_v) {
      best_v = v;
      best_w = w;
    }
  }
  return {best_w, best_v};
}

std::string grid_caveat(const FrequencyGrid& grid) {
  return grid.describe() + "; the condition is checked on this grid only";
}

void require_stable(const LtiSystem& g, const char* what) {
  if (!g.is_stable()) throw Error(ErrorCode::kUnstable, std::string(what) + ": system has a pole with Re >= -1e-9");
}

void require_compatible(const LtiSystem& g, const LtiSystem& h) {
  if (g.size() != h.size() || g.tubes() != h.tubes()) {
    throw Error(ErrorCode::kDimensionMismatch, "G and H must have the same m and p");
  }
}

}  // namespace

LtiSystem::LtiSystem(StateSpaceTensor ss) {
  const Index m = ss.A.rows();
  const Index p = ss.A.tubes();
  for (const Tensor3* t : {&ss.A, &ss.B, &ss.C, &ss.D}) {
    if (t->rows() != m || t->cols() != m || t->tubes() != p) {
      throw Error(ErrorCode::kDimensionMismatch, "state-space tensors must all be m x m x p");
    }
    for (const auto& s : t->slices()) {
      if (s.imag().cwiseAbs().maxCoeff() != 0.0) throw Error(ErrorCode::kInvalidArgument, "state-space data must be real");
    }
  }
  m_ = m;
  p_ = p;
  repr_ = std::move(ss);
}

LtiSystem::LtiSystem(RationalSliceTF tf) {
  if (tf.slices.empty()) throw Error(ErrorCode::kInvalidArgument, "rational system needs at least one slice");
  const std::size_t m = tf.slices.front().size();
  if (m == 0) throw Error(ErrorCode::kInvalidArgument, "rational system needs m >= 1");
  for (auto& slice : tf.slices) {
    if (slice.size() != m) throw Error(ErrorCode::kDimensionMismatch, "rational slices must be m x m");
    for (auto& row : slice) {
      if (row.size() != m) throw Error(ErrorCode::kDimensionMismatch, "rational slices must be m x m");
      for (auto& e : row) {
        e.num = trim(std::move(e.num));
        e.den = trim(std::move(e.den));
        for (double c : e.num) {
          if (!std::isfinite(c)) throw Error(ErrorCode::kInvalidArgument, "non-finite numerator coefficient");
        }
        for (double c : e.den) {
          if (!std::isfinite(c)) throw Error(ErrorCode::kInvalidArgument, "non-finite denominator coefficient");
        }
        if (is_zero(e.den)) throw Error(ErrorCode::kInvalidArgument, "zero denominator");
        if (!is_zero(e.num) && degree(e.num) > degree(e.den)) {
          throw Error(ErrorCode::kInvalidArgument, "rational entry is not proper");
        }
      }
    }
  }
  m_ = static_cast<Index>(m);
  p_ = static_cast<Index>(tf.slices.size());
  repr_ = std::move(tf);
}

LtiSystem LtiSystem::static_gain(const Tensor3& d) {
  if (!d.frontal_square()) throw Error(ErrorCode::kDimensionMismatch, "static gain must be m x m x p");
  RationalSliceTF tf;
  for (Index k = 0; k < d.tubes(); ++k) {
    std::vector<std::vector<RationalEntry>> slice(static_cast<std::size_t>(d.rows()));
    for (Index i = 0; i < d.rows(); ++i) {
      for (Index j = 0; j < d.cols(); ++j) {
        const Complex v = d(i, j, k);
        if (v.imag() != 0.0) throw Error(ErrorCode::kInvalidArgument, "static gain must be real");
        slice[static_cast<std::size_t>(i)].push_back({{v.real()}, {1.0}});
      }
    }
    tf.slices.push_back(std::move(slice));
  }
  return LtiSystem(std::move(tf));
}

std::vector<CMatrix> LtiSystem::fourier_response(Complex s) const {
  if (const auto* ss = std::get_if<StateSpaceTensor>(&repr_)) {
    const FourierSlices a = to_fourier(ss->A);
    const FourierSlices b = to_fourier(ss->B);
    const FourierSlices c = to_fourier(ss->C);
    const FourierSlices d = to_fourier(ss->D);
    std::vector<CMatrix> out;
    for (Index k = 0; k < p_; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      CMatrix resolvent = -a.slices[kk];
      resolvent.diagonal().array() += s;
      Eigen::PartialPivLU<CMatrix> lu(resolvent);
      if (!(lu.rcond() > 1e-14)) throw Error(ErrorCode::kPoleAtFrequency, "s is a pole of the system");
      out.push_back(c.slices[kk] * lu.solve(b.slices[kk]) + d.slices[kk]);
    }
    return out;
  }
  const auto& tf = std::get<RationalSliceTF>(repr_);
  std::vector<CMatrix> time;
  for (const auto& slice : tf.slices) {
    CMatrix g(m_, m_);
    for (Index i = 0; i < m_; ++i) {
      for (Index j = 0; j < m_; ++j) {
        const auto& e = slice[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        const Complex den = polyval(e.den, s);
        if (std::abs(den) <= 1e-14 * polyval_scale(e.den, std::abs(s))) {
          throw Error(ErrorCode::kPoleAtFrequency, "s is a root of a denominator");
        }
        g(i, j) = polyval(e.num, s) / den;
      }
    }
    time.push_back(std::move(g));
  }
  return to_fourier(Tensor3::from_slices(std::move(time))).slices;
}

Tensor3 LtiSystem::response(Complex s) const { return from_fourier({fourier_response(s)}); }

std::vector<CMatrix> LtiSystem::fourier_response_at_infinity() const {
  if (const auto* ss = std::get_if<StateSpaceTensor>(&repr_)) return to_fourier(ss->D).slices;
  const auto& tf = std::get<RationalSliceTF>(repr_);
  std::vector<CMatrix> time;
  for (const auto& slice : tf.slices) {
    CMatrix g = CMatrix::Zero(m_, m_);
    for (Index i = 0; i < m_; ++i) {
      for (Index j = 0; j < m_; ++j) {
        const auto& e = slice[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        if (!is_zero(e.num) && degree(e.num) == degree(e.den)) g(i, j) = e.num.front() / e.den.front();
      }
    }
    time.push_back(std::move(g));
  }
  return to_fourier(Tensor3::from_slices(std::move(time))).slices;
}

std::vector<Complex> LtiSystem::poles() const {
  if (const auto* ss = std::get_if<StateSpaceTensor>(&repr_)) return t_eigenvalues(ss->A);
  const auto& tf = std::get<RationalSliceTF>(repr_);
  std::vector<Polynomial> seen;
  std::vector<Complex> out;
  for (const auto& slice : tf.slices) {
    for (const auto& row : slice) {
      for (const auto& e : row) {
        if (std::find(seen.begin(), seen.end(), e.den) != seen.end()) continue;
        seen.push_back(e.den);
        for (const Complex& z : roots(e.den)) out.push_back(z);
      }
    }
  }
  return out;
}

bool LtiSystem::is_stable() const {
  const std::vector<Complex> ps = poles();
  if (is_state_space()) {
    double radius = 0.0;
    double abscissa = -kInf;
    for (const auto& z : ps) {
      radius = std::max(radius, std::abs(z));
      abscissa = std::max(abscissa, z.real());
    }
    return abscissa < -kStabilityMargin * (1.0 + radius);
  }
  return std::all_of(ps.begin(), ps.end(), [](const Complex& z) { return z.real() < -kStabilityMargin; });
}

std::vector<SliceRealization> LtiSystem::fourier_realization() const {
  if (const auto* ss = std::get_if<StateSpaceTensor>(&repr_)) {
    const FourierSlices a = to_fourier(ss->A);
    const FourierSlices b = to_fourier(ss->B);
    const FourierSlices c = to_fourier(ss->C);
    const FourierSlices d = to_fourier(ss->D);
    std::vector<SliceRealization> out;
    for (std::size_t k = 0; k < a.slices.size(); ++k) out.push_back({a.slices[k], b.slices[k], c.slices[k], d.slices[k]});
    return out;
  }

  // Companion realizations shared across slices: one block per (input column,
  // monic denominator). Slice k's output map combines the time slices with
  // the DFT weights exp(-2 pi i jk / p).
  const auto& tf = std::get<RationalSliceTF>(repr_);
  const Index m = m_;
  const Index p = p_;
  struct Block {
    Index column;
    Polynomial den;
    std::vector<std::pair<Index, Index>> members;  // (time slice, row)
    std::vector<Polynomial> rems;
  };
  std::vector<Block> blocks;
  std::vector<CMatrix> direct(static_cast<std::size_t>(p), CMatrix::Zero(m, m));
  for (Index k = 0; k < p; ++k) {
    for (Index i = 0; i < m; ++i) {
      for (Index j = 0; j < m; ++j) {
        const ProperSplit sp = split_proper(tf.slices[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
        direct[static_cast<std::size_t>(k)](i, j) = sp.direct;
        if (sp.monic_den.empty()) continue;
        auto it = std::find_if(blocks.begin(), blocks.end(),
                               [&](const Block& b) { return b.column == j && b.den == sp.monic_den; });
        if (it == blocks.end()) {
          blocks.push_back({j, sp.monic_den, {}, {}});
          it = std::prev(blocks.end());
        }
        it->members.emplace_back(k, i);
        it->rems.push_back(sp.rem);
      }
    }
  }
  Index states = 0;
  for (const auto& b : blocks) states += static_cast<Index>(b.den.size());

  CMatrix a = CMatrix::Zero(states, states);
  CMatrix bm = CMatrix::Zero(states, m);
  Index off = 0;
  for (const auto& blk : blocks) {
    const Index n = static_cast<Index>(blk.den.size());
    for (Index r = 0; r + 1 < n; ++r) a(off + r, off + r + 1) = 1.0;
    for (Index c = 0; c < n; ++c) a(off + n - 1, off + c) = -blk.den[static_cast<std::size_t>(n - 1 - c)];
    bm(off + n - 1, blk.column) = 1.0;
    off += n;
  }
  const FourierSlices dhat = to_fourier(Tensor3::from_slices(direct));
  std::vector<SliceRealization> out;
  for (Index k = 0; k < p; ++k) {
    CMatrix c = CMatrix::Zero(m, states);
    Index o = 0;
    for (const auto& blk : blocks) {
      const Index n = static_cast<Index>(blk.den.size());
      for (std::size_t t = 0; t < blk.members.size(); ++t) {
        const auto [slice, row] = blk.members[t];
        const Complex w = std::polar(1.0, -2.0 * kPi * static_cast<double>(slice * k % p) / static_cast<double>(p));
        for (Index col = 0; col < n; ++col) c(row, o + col) += w * blk.rems[t][static_cast<std::size_t>(n - 1 - col)];
      }
      o += n;
    }
    out.push_back({a, bm, c, dhat.slices[static_cast<std::size_t>(k)]});
  }
  return out;
}

Tensor3 freq_response(const LtiSystem& g, double omega) { return g.response(Complex(0.0, omega)); }

std::vector<double> FrequencyGrid::log_points() const {
  if (points < 1 || !(lo > 0.0) || !(hi >= lo)) throw Error(ErrorCode::kInvalidArgument, "bad frequency grid");
  std::vector<double> out;
  if (points == 1) return {lo};
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (int i = 0; i < points; ++i) out.push_back(std::pow(10.0, a + (b - a) * i / (points - 1)));
  out.back() = hi;
  out.front() = lo;
  return out;
}

std::vector<double> FrequencyGrid::all_points() const {
  std::vector<double> out{0.0};
  const auto logs = log_points();
  out.insert(out.end(), logs.begin(), logs.end());
  out.push_back(kInf);
  return out;
}

std::string FrequencyGrid::describe() const {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%d log-spaced points on [%g, %g] rad/s plus 0 and infinity, refinement %s", points,
                lo, hi, refine ? "on" : "off");
  return buf;
}

HinfResult hinf_norm(const LtiSystem& g, const FrequencyGrid& grid) {
  require_stable(g, "hinf_norm");
  const auto [w, v] = grid_max(grid, [&](double omega) { return sigma_max(response_at(g, omega)); });
  return {v, w};
}

std::optional<PhaseExtremes> phase_extremes(const std::vector<CMatrix>& fourier_slices) {
  try {
    FourierSlices f;
    f.slices = fourier_slices;
    const SectorialFactorization sf = sectorial_decompose(f);
    return PhaseExtremes{sf.phases.max(), sf.phases.min()};
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kNotSectorial || e.code() == ErrorCode::kBranchSpread) return std::nullopt;
    throw;
  }
}

bool PhaseEnvelope::frequency_wise_sectorial() const {
  return !points.empty() && std::all_of(points.begin(), points.end(), [](const FrequencyPoint& p) { return p.sectorial; });
}

PhaseEnvelope phase_envelope(const LtiSystem& g, const FrequencyGrid& grid) {
  PhaseEnvelope env;
  env.lower = kInf;
  env.upper = -kInf;
  for (double omega : grid.all_points()) {
    const std::vector<CMatrix> slices = response_at(g, omega);
    FrequencyPoint pt;
    pt.omega = omega;
    pt.sigma_min = kInf;
    for (const auto& s : slices) {
      Eigen::JacobiSVD<CMatrix> svd(s);
      const RVector& sv = svd.singularValues();
      if (sv.size() == 0) continue;
      pt.sigma_max = std::max(pt.sigma_max, sv(0));
      pt.sigma_min = std::min(pt.sigma_min, sv(sv.size() - 1));
    }
    if (const auto ex = phase_extremes(slices)) {
      pt.sectorial = true;
      pt.phi_max = ex->phi_max;
      pt.phi_min = ex->phi_min;
      env.upper = std::max(env.upper, pt.phi_max);
      env.lower = std::min(env.lower, pt.phi_min);
    }
    env.hinf = std::max(env.hinf, pt.sigma_max);
    env.points.push_back(pt);
  }

  if (grid.refine) {
    auto phase_at = [&](double omega, bool upper) {
      const auto ex = phase_extremes(response_at(g, omega));
      if (!ex) return -kInf;
      return upper ? ex->phi_max : -ex->phi_min;
    };
    // Refine around the interior grid extremes of phi_max and phi_min.
    auto refine_side = [&](bool upper) {
      std::size_t best = 0;
      double best_v = -kInf;
      for (std::size_t i = 0; i < env.points.size(); ++i) {
        const auto& pt = env.points[i];
        if (!pt.sectorial) continue;
        const double v = upper ? pt.phi_max : -pt.phi_min;
        if (v > best_v) {
          best_v = v;
          best = i;
        }
      }
      if (best < 2 || best + 2 >= env.points.size()) return;
      const auto [w, v] = golden_max_log([&](double omega) { return phase_at(omega, upper); },
                                         env.points[best - 1].omega, env.points[best + 1].omega);
      (void)w;
      if (upper) {
        env.upper = std::max(env.upper, v);
      } else {
        env.lower = std::min(env.lower, -v);
      }
    };
    refine_side(true);
    refine_side(false);
    const auto [w, v] = grid_max(grid, [&](double omega) { return sigma_max(response_at(g, omega)); });
    (void)w;
    env.hinf = std::max(env.hinf, v);
  }
  if (env.upper < env.lower) {
    env.upper = std::numeric_limits<double>::quiet_NaN();
    env.lower = std::numeric_limits<double>::quiet_NaN();
  }
  return env;
}

std::vector<CMatrix> GangOfFour::fourier_response(Complex s) const {
  const auto gs = g_.fourier_response(s);
  const auto hs = h_.fourier_response(s);
  std::vector<CMatrix> out;
  for (std::size_t k = 0; k < gs.size(); ++k) {
    const Index m = gs[k].rows();
    CMatrix loop = hs[k] * gs[k];
    loop.diagonal().array() += 1.0;
    const CMatrix sens = loop.partialPivLu().inverse();
    CMatrix blk(2 * m, 2 * m);
    blk.topLeftCorner(m, m) = sens;
    blk.topRightCorner(m, m) = sens * hs[k];
    blk.bottomLeftCorner(m, m) = gs[k] * sens;
    blk.bottomRightCorner(m, m) = gs[k] * sens * hs[k];
    out.push_back(std::move(blk));
  }
  return out;
}

Tensor3 GangOfFour::response(Complex s) const { return from_fourier({fourier_response(s)}); }

GangOfFour gang_of_four(const LtiSystem& g, const LtiSystem& h, const FrequencyGrid& grid) {
  require_compatible(g, h);
  for (double omega : grid.all_points()) {
    const auto gs = response_at(g, omega);
    const auto hs = response_at(h, omega);
    for (std::size_t k = 0; k < gs.size(); ++k) {
      CMatrix loop = hs[k] * gs[k];
      loop.diagonal().array() += 1.0;
      Eigen::JacobiSVD<CMatrix> svd(loop);
      const RVector& sv = svd.singularValues();
      if (!(sv(sv.size() - 1) > kWellPosedTol)) {
        throw Error(ErrorCode::kIllPosed, "I + H G is singular at omega = " + io::format_double(omega));
      }
    }
  }
  return GangOfFour(g, h);
}

StabilityReport feedback_stable(const LtiSystem& g, const LtiSystem& h) {
  require_compatible(g, h);
  const auto rg = g.fourier_realization();
  const auto rh = h.fourier_realization();
  StabilityReport rep;
  double radius = 0.0;
  rep.spectral_abscissa = -kInf;
  for (std::size_t k = 0; k < rg.size(); ++k) {
    const auto& [a1, b1, c1, d1] = rg[k];
    const auto& [a2, b2, c2, d2] = rh[k];
    const Index m = d1.rows();
    CMatrix ip = d2 * d1;
    ip.diagonal().array() += 1.0;
    Eigen::JacobiSVD<CMatrix> svd(ip);
    if (!(svd.singularValues()(m - 1) > kWellPosedTol)) throw Error(ErrorCode::kIllPosed, "I + D_H D_G is singular");
    const CMatrix delta = ip.partialPivLu().inverse();
    const Index n1 = a1.rows();
    const Index n2 = a2.rows();
    CMatrix acl(n1 + n2, n1 + n2);
    if (n1 > 0) {
      acl.topLeftCorner(n1, n1) = a1 - b1 * delta * d2 * c1;
      if (n2 > 0) acl.topRightCorner(n1, n2) = -b1 * delta * c2;
    }
    if (n2 > 0) {
      if (n1 > 0) acl.bottomLeftCorner(n2, n1) = b2 * (c1 - d1 * delta * d2 * c1);
      acl.bottomRightCorner(n2, n2) = a2 - b2 * d1 * delta * c2;
    }
    if (acl.rows() == 0) continue;
    Eigen::ComplexEigenSolver<CMatrix> es(acl, false);
    for (Index i = 0; i < es.eigenvalues().size(); ++i) {
      const Complex z = es.eigenvalues()(i);
      rep.poles.push_back(z);
      radius = std::max(radius, std::abs(z));
      rep.spectral_abscissa = std::max(rep.spectral_abscissa, z.real());
    }
  }
  rep.stable = rep.spectral_abscissa < -kStabilityMargin * std::max(1.0, radius);
  return rep;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::kCertified:
      return "certified";
    case Verdict::kInconclusive:
      return "inconclusive";
    case Verdict::kAssumptionViolated:
      return "assumption-violated";
  }
  return "unknown";
}

Certificate small_gain_certificate(const LtiSystem& g, const LtiSystem& h, const FrequencyGrid& grid) {
  require_compatible(g, h);
  require_stable(g, "small_gain_certificate");
  require_stable(h, "small_gain_certificate");
  Certificate cert;
  cert.condition = "sigma_max(G(jw)) * sigma_max(H(jw)) < 1 for all w";
  cert.grid_note = grid_caveat(grid);
  auto product = [&](double omega) { return sigma_max(response_at(g, omega)) * sigma_max(response_at(h, omega)); };
  for (double omega : grid.all_points()) {
    if (product(omega) >= 1.0) cert.offending_frequencies.push_back(omega);
  }
  const auto [w, v] = grid_max(grid, product);
  cert.worst_value = v;
  cert.worst_frequency = w;
  if (v < 1.0) {
    cert.verdict = Verdict::kCertified;
    cert.loop = feedback_stable(g, h);
    if (!cert.loop->stable) throw std::logic_error("small gain certified a loop whose closed-loop poles are unstable");
  } else {
    if (cert.offending_frequencies.empty()) cert.offending_frequencies.push_back(w);
    cert.verdict = Verdict::kInconclusive;
  }
  return cert;
}

Certificate small_phase_certificate(const LtiSystem& g, const LtiSystem& h, const FrequencyGrid& grid) {
  require_compatible(g, h);
  require_stable(g, "small_phase_certificate");
  require_stable(h, "small_phase_certificate");
  Certificate cert;
  cert.condition = "phi_max(G) + phi_max(H) < pi and phi_min(G) + phi_min(H) > -pi for all w in [0, inf]";
  cert.grid_note = grid_caveat(grid);

  // Phase margin of the pair at one frequency, or nullopt if an assumption fails.
  auto margin = [&](double omega) -> std::optional<double> {
    const auto eg = phase_extremes(response_at(g, omega));
    const auto eh = phase_extremes(response_at(h, omega));
    if (!eg || !eh || eg->phi_max - eg->phi_min >= kPi) return std::nullopt;
    return std::min(kPi - (eg->phi_max + eh->phi_max), eg->phi_min + eh->phi_min + kPi);
  };

  const std::vector<double> pts = grid.all_points();
  std::vector<double> values;
  for (double omega : pts) {
    const auto mv = margin(omega);
    if (!mv) cert.offending_frequencies.push_back(omega);
    values.push_back(mv.value_or(-kInf));
  }
  if (!cert.offending_frequencies.empty()) {
    cert.verdict = Verdict::kAssumptionViolated;
    cert.condition += " (requires G quasi-sectorial and H sectorial at every grid frequency)";
    cert.worst_frequency = cert.offending_frequencies.front();
    cert.worst_value = -kInf;
    return cert;
  }
  const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
  cert.worst_value = values[best];
  cert.worst_frequency = pts[best];
  if (grid.refine && best >= 2 && best + 2 < pts.size()) {
    const auto [w, v] = golden_max_log(
        [&](double omega) {
          const auto mv = margin(omega);
          return mv ? -*mv : kInf;
        },
        pts[best - 1], pts[best + 1]);
    if (-v < cert.worst_value) {
      cert.worst_value = -v;
      cert.worst_frequency = w;
    }
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (values[i] <= 0.0) cert.offending_frequencies.push_back(pts[i]);
  }
  if (cert.worst_value > 0.0) {
    cert.verdict = Verdict::kCertified;
    cert.loop = feedback_stable(g, h);
    if (!cert.loop->stable) throw std::logic_error("small phase certified a loop whose closed-loop poles are unstable");
  } else {
    cert.verdict = Verdict::kInconclusive;
  }
  return cert;
}

std::string bode_csv(const LtiSystem& g, const FrequencyGrid& grid) {
  const PhaseEnvelope env = phase_envelope(g, grid);
  std::string out = "omega_rad_s,sigma_max,sigma_min,phi_max_deg,phi_min_deg,sectorial\n";
  constexpr double kDeg = 180.0 / kPi;
  for (const auto& pt : env.points) {
    out += io::format_double(pt.omega) + ',' + io::format_double(pt.sigma_max) + ',' +
           io::format_double(pt.sigma_min) + ',' + io::format_double(pt.phi_max * kDeg) + ',' +
           io::format_double(pt.phi_min * kDeg) + ',' + (pt.sectorial ? '1' : '0') + '\n';
  }
  return out;
}

void bode_export(const LtiSystem& g, const FrequencyGrid& grid, const std::filesystem::path& path) {
  io::write_text_atomic(path, bode_csv(g, grid));
}

}  // namespace tphase
