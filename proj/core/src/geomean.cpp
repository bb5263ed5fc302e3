#include "tphase/geomean.hpp"

#include <algorithm>
#include <cmath>

#include "tphase/matrix_kernels.hpp"
#include "tphase/random.hpp"

namespace tphase {

namespace {

void require_accretive(const FourierSlices& f, const char* what) {
  for (const auto& s : f.slices) {
    if (!is_accretive(s)) throw Error(ErrorCode::kNotAccretive, std::string(what) + ": argument is not strictly accretive");
  }
}

void require_square_pair(const Tensor3& a, const Tensor3& b, const char* what) {
  if (!a.frontal_square() || !a.same_shape(b)) {
    throw Error(ErrorCode::kDimensionMismatch, std::string(what) + ": expected two n x n x p tensors");
  }
}

std::vector<double> half_sum(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = 0.5 * (x[i] + y[i]);
  return out;
}

double max_abs_diff(const std::vector<double>& x, const std::vector<double>& y) {
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(x[i] - y[i]));
  return d;
}

}  // namespace

Tensor3 t_power(const Tensor3& a, double alpha) {
  if (!a.frontal_square()) throw Error(ErrorCode::kDimensionMismatch, "t_power needs a frontal-square tensor");
  if (alpha == 1.0) return a;
  if (alpha == 0.0) return Tensor3::identity(a.rows(), a.tubes());
  if (alpha == -1.0) return t_inverse(a);
  FourierSlices f = to_fourier(a);
  require_accretive(f, "t_power");
  for (auto& s : f.slices) s = principal_power_matrix(s, alpha);
  return from_fourier(f);
}

Tensor3 t_geomean(const Tensor3& a, const Tensor3& b) {
  require_square_pair(a, b, "t_geomean");
  FourierSlices fa = to_fourier(a);
  const FourierSlices fb = to_fourier(b);
  require_accretive(fa, "t_geomean");
  require_accretive(fb, "t_geomean");
  for (std::size_t k = 0; k < fa.slices.size(); ++k) fa.slices[k] = matrix_geomean(fa.slices[k], fb.slices[k]);
  return from_fourier(fa);
}

double riccati_residual(const Tensor3& x, const Tensor3& a, const Tensor3& b) {
  const Tensor3 lhs = tprod(tprod(x, t_inverse(a)), x);
  return (lhs - b).frobenius_norm() / std::max(b.frobenius_norm(), 1e-300);
}

Tensor3 arithmetic_mean(const Tensor3& x, const Tensor3& y) {
  if (!x.same_shape(y)) throw Error(ErrorCode::kDimensionMismatch, "arithmetic_mean: tensor shapes differ");
  return (x + y) * Complex(0.5);
}

bool is_t_hermitian(const Tensor3& x, double tol) {
  if (!x.frontal_square()) return false;
  return (x - conj_transpose(x)).frobenius_norm() <= tol * x.frobenius_norm();
}

std::vector<double> hermitian_t_eigenvalues(const Tensor3& x) {
  if (!is_t_hermitian(x)) throw Error(ErrorCode::kNotHermitian, "tensor is not T-Hermitian");
  const FourierSlices f = to_fourier(x);
  std::vector<double> out;
  for (const auto& s : f.slices) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(s), Eigen::EigenvaluesOnly);
    for (Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()(i));
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

MajorizationReport check_kyfan_eig(const Tensor3& x, const Tensor3& y, double tol) {
  const std::vector<double> lx = hermitian_t_eigenvalues(x);
  const std::vector<double> ly = hermitian_t_eigenvalues(y);
  MajorizationReport r;
  r.lhs = hermitian_t_eigenvalues(x + y);
  r.rhs.resize(lx.size());
  for (std::size_t i = 0; i < lx.size(); ++i) r.rhs[i] = lx[i] + ly[i];
  r.result = majorizes(r.rhs, r.lhs, MajorizationMode::kStrong, tol);
  return r;
}

MajorizationReport check_lidskii_eig(const Tensor3& x, const Tensor3& y, double tol) {
  const std::vector<double> lx = hermitian_t_eigenvalues(x);
  const std::vector<double> lxy = hermitian_t_eigenvalues(x + y);
  MajorizationReport r;
  r.rhs = hermitian_t_eigenvalues(y);
  r.lhs.resize(lx.size());
  for (std::size_t i = 0; i < lx.size(); ++i) r.lhs[i] = lxy[i] - lx[i];
  r.result = majorizes(r.rhs, r.lhs, MajorizationMode::kStrong, tol);
  return r;
}

bool PhaseMajorizationReport::holds() const {
  return theorem.result.holds && square_root.result.holds &&
         std::all_of(gauges.begin(), gauges.end(), [](const GaugeCheck& g) { return g.holds; });
}

PhaseMajorizationReport check_phase_majorization(const Tensor3& a, const Tensor3& b,
                                                 const std::vector<GaugeSpec>& extra, double tol) {
  const Tensor3 mean = t_geomean(a, b);
  const std::vector<double> pa = canonical_phases(a).values;
  const std::vector<double> pb = canonical_phases(b).values;
  const std::vector<double> pm = canonical_phases(mean).values;

  PhaseMajorizationReport rep;
  rep.theorem.lhs = pm;
  rep.theorem.rhs = half_sum(pa, pb);
  rep.theorem.result = majorizes(rep.theorem.rhs, rep.theorem.lhs, MajorizationMode::kStrong, tol);

  std::vector<double> root = canonical_phases(t_power(a, 0.5)).values;
  for (double& v : root) v *= 2.0;
  rep.square_root.lhs = root;
  rep.square_root.rhs = pa;
  rep.square_root.result = majorizes(pa, root, MajorizationMode::kStrong, tol);

  std::vector<GaugeSpec> gauges;
  for (std::size_t k = 1; k <= pa.size(); ++k) gauges.push_back(GaugeSpec::ky_fan(static_cast<int>(k)));
  gauges.push_back(GaugeSpec::lp(1.0));
  gauges.insert(gauges.end(), extra.begin(), extra.end());
  for (const auto& g : gauges) {
    GaugeCheck c{g};
    c.mean_value = gauge_eval(g, pm);
    c.bound = 0.5 * (gauge_eval(g, pa) + gauge_eval(g, pb));
    c.holds = c.mean_value <= c.bound + tol;
    rep.gauges.push_back(c);
  }
  return rep;
}

MaximalElementWitness maximal_element_witness(const Tensor3& a, const Tensor3& b) {
  require_square_pair(a, b, "maximal_element_witness");
  require_accretive(to_fourier(a), "maximal_element_witness");
  require_accretive(to_fourier(b), "maximal_element_witness");
  const SectorialFactorization fa = sectorial_decompose(a);
  const SectorialFactorization fb = sectorial_decompose(b);

  MaximalElementWitness w;
  w.x = tprod(t_inverse(fa.factor_tensor()), fb.factor_tensor());
  const Tensor3 moved = tprod(tprod(conj_transpose(w.x), a), w.x);
  w.achieved = canonical_phases(t_geomean(moved, b)).values;
  w.bound = half_sum(fa.phases.values, fb.phases.values);

  for (std::size_t k = 0; k < fa.slice_phases.size(); ++k) {
    const RVector& sa = fa.slice_phases[k];
    const RVector& sb = fb.slice_phases[k];
    for (Index i = 0; i < sa.size(); ++i) w.slice_paired_bound.push_back(0.5 * (sa(i) + sb(i)));
  }
  std::sort(w.slice_paired_bound.begin(), w.slice_paired_bound.end(), std::greater<>());
  w.deviation = max_abs_diff(w.achieved, w.bound);
  w.slice_deviation = max_abs_diff(w.achieved, w.slice_paired_bound);
  return w;
}

double phase_lidskii_violation(const Tensor3& a, const Tensor3& b) {
  const std::vector<double> pa = canonical_phases(a).values;
  const std::vector<double> pb = canonical_phases(b).values;
  const std::vector<double> pm = canonical_phases(t_geomean(a, b)).values;
  std::vector<double> lhs(pm.size());
  for (std::size_t i = 0; i < pm.size(); ++i) lhs[i] = 2.0 * pm[i] - pa[i];
  return majorizes(pb, lhs, MajorizationMode::kStrong, 0.0).max_violation;
}

ProbeReport probe_phase_lidskii(int trials, std::uint64_t seed, ProbeSizes sizes, double tol) {
  ProbeReport rep;
  rep.seed = seed;
  rep.trials = trials;
  rep.tol = tol;
  rep.max_violation = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(t));
    Rng rng(s);
    std::uniform_int_distribution<Index> dn(1, sizes.max_n);
    std::uniform_int_distribution<Index> dp(1, sizes.max_p);
    const Index n = dn(rng);
    const Index p = dp(rng);
    const Tensor3 a = random_accretive(n, p, rng);
    const Tensor3 b = random_accretive(n, p, rng);
    const double v = phase_lidskii_violation(a, b);
    if (v > tol) ++rep.violations;
    if (v > rep.max_violation) {
      rep.max_violation = v;
      rep.worst_trial = t;
      rep.worst_trial_seed = s;
      rep.worst_a = a;
      rep.worst_b = b;
    }
  }
  if (trials <= 0) rep.max_violation = 0.0;
  return rep;
}

}  // namespace tphase
