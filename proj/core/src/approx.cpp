#include "tphase/approx.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "tphase/matrix_kernels.hpp"
#include "tphase/random.hpp"

namespace tphase {

namespace {

constexpr double kPi = std::numbers::pi;

void require_upper_half_sector(const PhaseVector& phases) {
  for (double v : phases.values) {
    if (v < -kPhaseZeroTol || v >= kPi - 1e-12) {
      throw Error(ErrorCode::kNotInSector, "canonical phases must lie in [0, pi)");
    }
  }
}

std::vector<double> fourier_singular_values(const Tensor3& x) {
  const FourierSlices f = to_fourier(x);
  std::vector<double> sv;
  for (const auto& s : f.slices) {
    Eigen::JacobiSVD<CMatrix> svd(s);
    for (Index i = 0; i < svd.singularValues().size(); ++i) sv.push_back(svd.singularValues()(i));
  }
  std::sort(sv.begin(), sv.end(), std::greater<>());
  return sv;
}

CMatrix diag_phases(const RVector& theta) {
  CVector d(theta.size());
  for (Index i = 0; i < theta.size(); ++i) d(i) = std::polar(1.0, theta(i));
  return d.asDiagonal().toDenseMatrix();
}

// Random subset of size r from {0, ..., n - 1}.
std::vector<std::size_t> random_positions(std::size_t n, std::size_t r, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(r);
  return idx;
}

}  // namespace

TSVDFactors t_svd(const Tensor3& a) {
  const FourierSlices f = to_fourier(a);
  const Index m = a.rows();
  const Index n = a.cols();
  TSVDFactors out;
  FourierSlices fu, fs, fv;
  struct Entry {
    double value;
    PhaseSource src;
  };
  std::vector<Entry> all;
  for (Index k = 0; k < f.tubes(); ++k) {
    Eigen::JacobiSVD<CMatrix> svd(f.slices[static_cast<std::size_t>(k)], Eigen::ComputeFullU | Eigen::ComputeFullV);
    const RVector s = svd.singularValues();
    CMatrix sk = CMatrix::Zero(m, n);
    for (Index i = 0; i < s.size(); ++i) {
      sk(i, i) = s(i);
      all.push_back({s(i), {k, i}});
    }
    out.slice_u.push_back(svd.matrixU());
    out.slice_s.push_back(s);
    out.slice_v.push_back(svd.matrixV());
    fu.slices.push_back(svd.matrixU());
    fs.slices.push_back(sk);
    fv.slices.push_back(svd.matrixV());
  }
  std::stable_sort(all.begin(), all.end(), [](const Entry& x, const Entry& y) {
    if (x.value != y.value) return x.value > y.value;
    if (x.src.slice != y.src.slice) return x.src.slice < y.src.slice;
    return x.src.in_slice < y.src.in_slice;
  });
  for (const auto& e : all) {
    out.sigma.push_back(e.value);
    out.sources.push_back(e.src);
  }
  out.U = from_fourier(fu);
  out.S = from_fourier(fs);
  out.V = from_fourier(fv);
  return out;
}

int t_rank(const Tensor3& x, double rel_tol) {
  const std::vector<double> sv = fourier_singular_values(x);
  if (sv.empty() || sv.front() == 0.0) return 0;
  const double cut = rel_tol * sv.front();
  return static_cast<int>(std::count_if(sv.begin(), sv.end(), [cut](double v) { return v > cut; }));
}

RankTruncation truncate_rank(const Tensor3& a, int r, const GaugeSpec& gauge) {
  const Index total = a.tubes() * std::min(a.rows(), a.cols());
  if (r < 0 || r > total) throw Error(ErrorCode::kInvalidArgument, "truncation rank out of range");
  const TSVDFactors f = t_svd(a);
  std::vector<Index> keep(static_cast<std::size_t>(a.tubes()), 0);
  for (int i = 0; i < r; ++i) ++keep[static_cast<std::size_t>(f.sources[static_cast<std::size_t>(i)].slice)];

  FourierSlices fe;
  for (Index k = 0; k < a.tubes(); ++k) {
    const auto kk = static_cast<std::size_t>(k);
    const Index c = keep[kk];
    fe.slices.push_back(f.slice_u[kk].leftCols(c) * f.slice_s[kk].head(c).cast<Complex>().asDiagonal() *
                        f.slice_v[kk].leftCols(c).adjoint());
  }
  RankTruncation out{from_fourier(fe), 0.0, 0.0, gauge, r};
  std::vector<double> tail = f.sigma;
  std::fill(tail.begin(), tail.begin() + r, 0.0);
  out.optimal_value = gauge_eval(gauge, tail);
  out.frobenius_error = (a - out.E).frobenius_norm();
  return out;
}

HalfPhaseTruncation half_phase_truncate(const Tensor3& a, int r) {
  const SectorialFactorization sf = sectorial_decompose(a);
  require_upper_half_sector(sf.phases);
  const int np = static_cast<int>(sf.phases.size());
  if (r < 0 || r > np) throw Error(ErrorCode::kInvalidArgument, "truncation index out of range");

  HalfPhaseTruncation out;
  out.r = r;
  out.input_phases = sf.phases;
  std::vector<RVector> half(sf.slice_phases.size());
  for (std::size_t k = 0; k < half.size(); ++k) half[k] = RVector::Zero(sf.slice_phases[k].size());
  for (int i = 0; i < r; ++i) {
    const auto& src = sf.phases.sources[static_cast<std::size_t>(i)];
    const double h = sf.phases.values[static_cast<std::size_t>(i)] / 2.0;
    half[static_cast<std::size_t>(src.slice)](src.in_slice) = h;
    out.kept_phases.push_back(h);
    out.kept_sources.push_back(src);
  }
  out.residual_phases.assign(sf.phases.values.begin() + r, sf.phases.values.end());

  FourierSlices fe;
  for (std::size_t k = 0; k < half.size(); ++k) {
    const CMatrix& t = sf.factors[k];
    fe.slices.push_back(t.adjoint() * diag_phases(half[k]) * t);
  }
  out.E = from_fourier(fe);
  return out;
}

Tensor3 phase_residual(const Tensor3& a, const Tensor3& e) {
  const Tensor3 inv = t_inverse(e);
  return tprod(tprod(inv, a), inv);
}

double optimal_tprank_value(const PhaseVector& phases, int r, const GaugeSpec& psi) {
  require_upper_half_sector(phases);
  if (r < 0 || r > static_cast<int>(phases.size())) throw Error(ErrorCode::kInvalidArgument, "truncation index out of range");
  const std::vector<double> tail(phases.values.begin() + r, phases.values.end());
  return gauge_eval(psi, tail);
}

double optimal_tprank_value(const Tensor3& a, int r, const GaugeSpec& psi) {
  return optimal_tprank_value(canonical_phases(a), r, psi);
}

PhaseRankBridge phase_rank_bridge(const Tensor3& a) {
  const SectorialFactorization sf = sectorial_decompose(a);
  FourierSlices fr, fm;
  double min_eig = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < sf.factors.size(); ++k) {
    const CMatrix& t = sf.factors[k];
    const RVector& ph = sf.slice_phases[k];
    CVector dm(ph.size());
    for (Index i = 0; i < ph.size(); ++i) dm(i) = std::polar(1.0, ph(i)) - 1.0;
    fr.slices.push_back(t.adjoint() * dm.asDiagonal() * t);
    const CMatrix m = t.adjoint() * t;
    min_eig = std::min(min_eig, lambda_min_hermitian(hermitian_part(m)));
    fm.slices.push_back(m);
  }
  PhaseRankBridge out;
  out.R = from_fourier(fr);
  out.M = from_fourier(fm);
  out.rank_r = t_rank(out.R, kRankTol);
  out.tprank_a = tprank(sf.phases);
  out.min_real_eig_m = min_eig;
  return out;
}

SectorArithmeticReport sector_arithmetic_checks(const Tensor3& a, const Tensor3& b) {
  const PhaseVector pa = canonical_phases(a);
  const PhaseVector pb = canonical_phases(b);
  SectorArithmeticReport rep;
  rep.alpha = std::min(pa.min(), pb.min());
  rep.beta = std::max(pa.max(), pb.max());
  if (rep.beta - rep.alpha >= kPi) throw Error(ErrorCode::kNotInSector, "the common sector is pi or wider");

  try {
    const PhaseVector ps = canonical_phases(a + b);
    rep.sum_in_sector = ps.max() <= rep.beta + 1e-9 && ps.min() >= rep.alpha - 1e-9;
  } catch (const Error&) {
    rep.sum_in_sector = false;
  }

  const double centre = 0.5 * (pa.max() + pa.min()) + 0.5 * (pb.max() + pb.min());
  for (const Complex& z : t_eigenvalues(tprod(a, b))) rep.product_arguments.push_back(std::arg(z));
  std::sort(rep.product_arguments.begin(), rep.product_arguments.end(), std::greater<>());
  rep.window_met = std::all_of(rep.product_arguments.begin(), rep.product_arguments.end(), [centre](double t) {
    return t > centre - kPi && t < centre + kPi;
  });
  if (!rep.window_met) {
    rep.note = "window condition not met, check skipped";
    return rep;
  }
  std::vector<double> sum(pa.size());
  for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = pa.values[i] + pb.values[i];
  rep.product_majorization = majorizes(sum, rep.product_arguments, MajorizationMode::kWeak);
  return rep;
}

CompetitorReport sample_phase_competitors(const Tensor3& a, const std::vector<GaugeSpec>& gauges,
                                          int samples, std::uint64_t seed) {
  const SectorialFactorization sf = sectorial_decompose(a);
  require_upper_half_sector(sf.phases);
  const Index n = a.rows();
  const Index p = a.tubes();
  const std::size_t np = sf.phases.size();

  CompetitorReport rep;
  rep.seed = seed;
  rep.min_gap = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(s)));
    std::uniform_int_distribution<std::size_t> dr(0, np);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const std::size_t r = dr(rng);
    const int strategy = s % 3;

    std::vector<CMatrix> frames;
    std::vector<RVector> theta;
    for (Index k = 0; k < p; ++k) theta.push_back(RVector::Zero(n));
    if (strategy == 1) {
      // Unrelated frame, small random half-phases.
      for (Index k = 0; k < p; ++k) frames.push_back(random_conditioned_matrix(n, 0.5, 2.0, rng));
      for (std::size_t pos : random_positions(np, r, rng)) {
        theta[pos / static_cast<std::size_t>(n)](static_cast<Index>(pos % static_cast<std::size_t>(n))) = 0.3 * u01(rng);
      }
    } else {
      frames = sf.factors;
      if (strategy == 2) {
        // Perturbed frame of A with jittered optimal half-phases.
        for (auto& t : frames) t += (0.05 * t.norm() / static_cast<double>(n)) * random_tensor(n, n, 1, rng).slice(0);
        for (std::size_t i = 0; i < r; ++i) {
          const auto& src = sf.phases.sources[i];
          theta[static_cast<std::size_t>(src.slice)](src.in_slice) =
              std::max(0.0, 0.5 * sf.phases.values[i] * (0.9 + 0.2 * u01(rng)));
        }
      } else {
        // A's own frame: arbitrary positions, partial half-phases.
        for (std::size_t i : random_positions(np, r, rng)) {
          const auto& src = sf.phases.sources[i];
          theta[static_cast<std::size_t>(src.slice)](src.in_slice) = 0.5 * u01(rng) * sf.phases.values[i];
        }
      }
    }
    ++rep.sampled;

    FourierSlices fe;
    for (Index k = 0; k < p; ++k) {
      const CMatrix& t = frames[static_cast<std::size_t>(k)];
      fe.slices.push_back(t.adjoint() * diag_phases(theta[static_cast<std::size_t>(k)]) * t);
    }
    try {
      const Tensor3 e = from_fourier(fe);
      const int rank_e = tprank(canonical_phases(e));
      const PhaseVector pw = canonical_phases(phase_residual(a, e));
      if (pw.min() < -kPhaseZeroTol || pw.max() >= kPi) continue;
      ++rep.feasible;
      for (const auto& g : gauges) {
        const double gap = gauge_eval(g, pw.values) - optimal_tprank_value(sf.phases, rank_e, g);
        rep.min_gap = std::min(rep.min_gap, gap);
      }
    } catch (const Error&) {
      continue;
    }
  }
  return rep;
}

CompetitorReport sample_rank_competitors(const Tensor3& a, int r, const GaugeSpec& gauge,
                                         int samples, std::uint64_t seed) {
  const RankTruncation best = truncate_rank(a, r, gauge);
  const TSVDFactors f = t_svd(a);
  const Index m = a.rows();
  const Index n = a.cols();
  const Index p = a.tubes();
  const Index q = std::min(m, n);
  const FourierSlices fa = to_fourier(a);

  CompetitorReport rep;
  rep.seed = seed;
  rep.min_gap = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(s)));
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    // Rank budget split across Fourier slices.
    std::vector<Index> alloc(static_cast<std::size_t>(p), 0);
    std::uniform_int_distribution<Index> pick(0, p - 1);
    for (int i = 0; i < r; ++i) {
      for (int tries = 0; tries < 4 * p; ++tries) {
        const Index k = pick(rng);
        if (alloc[static_cast<std::size_t>(k)] < q) {
          ++alloc[static_cast<std::size_t>(k)];
          break;
        }
      }
    }
    FourierSlices fe;
    for (Index k = 0; k < p; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      const Index c = alloc[kk];
      if (s % 2 == 0) {
        // Perturbed leading singular subspaces of the slice.
        const double eps = 0.05 * u01(rng);
        CMatrix uu = f.slice_u[kk].leftCols(c) + eps * random_tensor(m, c, 1, rng).slice(0);
        CMatrix vv = f.slice_v[kk].leftCols(c) + eps * random_tensor(n, c, 1, rng).slice(0);
        fe.slices.push_back(uu * f.slice_s[kk].head(c).cast<Complex>().asDiagonal() * vv.adjoint());
      } else {
        // Projection of the slice onto a random rank-c column space.
        const CMatrix basis = random_tensor(m, c, 1, rng).slice(0);
        Eigen::HouseholderQR<CMatrix> qr(basis);
        const CMatrix qm = CMatrix(qr.householderQ()).leftCols(c);
        fe.slices.push_back(qm * (qm.adjoint() * fa.slices[kk]));
      }
    }
    ++rep.sampled;
    ++rep.feasible;
    const Tensor3 e = from_fourier(fe);
    const double value = gauge_eval(gauge, fourier_singular_values(a - e));
    rep.min_gap = std::min(rep.min_gap, value - best.optimal_value);
  }
  return rep;
}

}  // namespace tphase
