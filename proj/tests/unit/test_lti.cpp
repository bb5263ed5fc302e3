#include <gtest/gtest.h>

#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "tphase/lti.hpp"
#include "tphase/random.hpp"

using namespace tphase;

namespace {

Rng rng_for(std::uint64_t i) { return Rng(derive_seed(7006, i)); }

Tensor3 real_tensor(const std::vector<std::vector<std::vector<double>>>& slices) {
  const Index p = static_cast<Index>(slices.size());
  const Index m = static_cast<Index>(slices[0].size());
  const Index n = static_cast<Index>(slices[0][0].size());
  Tensor3 t(m, n, p);
  for (Index k = 0; k < p; ++k)
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < n; ++j) t(i, j, k) = slices[k][i][j];
  return t;
}

// Entry (i, j) of slice k evaluated at s, straight from the polynomials.
CMatrix dense_transfer(const LtiSystem& g, Complex s) {
  const auto& tf = std::get<RationalSliceTF>(g.repr());
  const Index m = g.size(), p = g.tubes();
  Tensor3 t(m, m, p);
  auto ev = [](const Polynomial& c, Complex z) {
    Complex v = 0.0;
    for (double x : c) v = v * z + x;
    return v;
  };
  for (Index k = 0; k < p; ++k)
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < m; ++j) {
        const auto& e = tf.slices[k][i][j];
        t(i, j, k) = ev(e.num, s) / ev(e.den, s);
      }
  return oracle::dense_bcirc(t);
}

double dense_sigma_max(const LtiSystem& g, double w) {
  return oracle::dense_singular_values(dense_transfer(g, Complex(0.0, w))).front();
}

// Dense H-infinity estimate: fine log grid plus golden-section polishing.
double dense_hinf(const LtiSystem& g) {
  double best = 0.0, best_w = 1.0;
  for (int i = 0; i <= 4000; ++i) {
    const double w = std::pow(10.0, -3.0 + 6.0 * i / 4000.0);
    const double v = dense_sigma_max(g, w);
    if (v > best) {
      best = v;
      best_w = w;
    }
  }
  double a = std::log10(best_w) - 6.0 / 4000.0, b = std::log10(best_w) + 6.0 / 4000.0;
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 80; ++it) {
    const double c = b - phi * (b - a), d = a + phi * (b - a);
    if (dense_sigma_max(g, std::pow(10.0, c)) > dense_sigma_max(g, std::pow(10.0, d))) {
      b = d;
    } else {
      a = c;
    }
  }
  best = std::max(best, dense_sigma_max(g, std::pow(10.0, 0.5 * (a + b))));
  return std::max({best, dense_sigma_max(g, 0.0), dense_sigma_max(g, 1e12)});
}

// X' = -a X + B U, Y = C X + D U with scalar a; its transfer tensor is
// (C * B) / (s + a) + D, written out as rational slices.
struct DiagonalPair {
  LtiSystem ss;
  LtiSystem tf;
};

DiagonalPair diagonal_pair(double a, Index m, Index p, Rng& rng) {
  const Tensor3 b = random_real_tensor(m, m, p, rng);
  const Tensor3 c = random_real_tensor(m, m, p, rng);
  const Tensor3 d = random_real_tensor(m, m, p, rng);
  const Tensor3 cb = tprod(c, b);
  RationalSliceTF tf;
  for (Index k = 0; k < p; ++k) {
    std::vector<std::vector<RationalEntry>> rows;
    for (Index i = 0; i < m; ++i) {
      std::vector<RationalEntry> row;
      for (Index j = 0; j < m; ++j) {
        const double dv = d(i, j, k).real();
        row.push_back({{dv, cb(i, j, k).real() + a * dv}, {1.0, a}});
      }
      rows.push_back(row);
    }
    tf.slices.push_back(rows);
  }
  return {LtiSystem(StateSpaceTensor{Tensor3::identity(m, p) * Complex(-a), b, c, d}), LtiSystem(tf)};
}

}  // namespace

TEST(FreqResponse, StaticGain) {
  Rng rng = rng_for(0);
  const Tensor3 d = random_real_tensor(2, 2, 3, rng);
  const LtiSystem g = LtiSystem::static_gain(d);
  for (double w : {0.0, 0.1, 10.0}) EXPECT_LT(oracle::rel_err(freq_response(g, w), d), 1e-14);
  EXPECT_NEAR(hinf_norm(g).norm, oracle::dense_singular_values(oracle::dense_bcirc(d)).front(), 1e-12);
}

TEST(FreqResponse, BodeExampleAtZero) {
  const Tensor3 g0 = freq_response(fixture::bode_example(), 0.0);
  const Tensor3 expect = real_tensor({{{2.0, 0.5}, {0.5, 1.5}}, {{0.5, 0.1}, {0.1, 0.5}}});
  EXPECT_LT(oracle::rel_err(g0, expect), 1e-14);
}

TEST(FreqResponse, ConjugateSymmetry) {
  const LtiSystem g = fixture::bode_example();
  for (double w : {0.3, 1.0, 7.0}) {
    const Tensor3 pos = freq_response(g, w);
    const Tensor3 neg = freq_response(g, -w);
    for (Index k = 0; k < 2; ++k) EXPECT_LT((neg.slice(k) - pos.slice(k).conjugate()).norm(), 1e-14);
  }
}

TEST(FreqResponse, StateSpaceMatchesRational) {
  for (std::uint64_t t = 0; t < 5; ++t) {
    Rng rng = rng_for(100 + t);
    const DiagonalPair dp = diagonal_pair(0.7 + static_cast<double>(t), 2, 3, rng);
    for (double w : {0.0, 0.5, 3.0, 100.0}) {
      EXPECT_LT(oracle::rel_err(freq_response(dp.ss, w), freq_response(dp.tf, w)), 1e-9);
    }
    EXPECT_NEAR(hinf_norm(dp.ss).norm, hinf_norm(dp.tf).norm, 1e-8);
    const PhaseEnvelope e1 = phase_envelope(dp.ss), e2 = phase_envelope(dp.tf);
    if (std::isfinite(e1.upper) && std::isfinite(e2.upper)) {
      EXPECT_NEAR(e1.upper, e2.upper, 1e-8);
      EXPECT_NEAR(e1.lower, e2.lower, 1e-8);
    }
  }
}

TEST(FreqResponse, PoleOnAxis) {
  const LtiSystem g = fixture::scalar_system({1.0}, {1.0, 0.0, 4.0});
  try {
    (void)freq_response(g, 2.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPoleAtFrequency);
  }
  StateSpaceTensor ss{Tensor3::zeros(1, 1, 1), Tensor3::identity(1, 1), Tensor3::identity(1, 1), Tensor3::zeros(1, 1, 1)};
  EXPECT_THROW((void)freq_response(LtiSystem(ss), 0.0), Error);
}

TEST(LtiSystem, ValidatesInput) {
  EXPECT_THROW(fixture::scalar_system({1.0, 0.0, 0.0}, {1.0, 1.0}), Error);
  EXPECT_THROW(fixture::scalar_system({1.0}, {0.0}), Error);
  Tensor3 cplx = Tensor3::identity(1, 1);
  cplx(0, 0, 0) = Complex(1.0, 1.0);
  EXPECT_THROW((void)LtiSystem::static_gain(cplx), Error);
}

TEST(Stability, PolesOfBodeExample) {
  const LtiSystem g = fixture::bode_example();
  EXPECT_TRUE(g.is_stable());
  for (const auto& z : g.poles()) EXPECT_NEAR(std::abs(z - Complex(-1.0, std::copysign(1.0, z.imag()))), 0.0, 1e-10);
  EXPECT_FALSE(fixture::scalar_system({1.0}, {1.0, -1.0}).is_stable());
  EXPECT_FALSE(fixture::scalar_system({1.0}, {1.0, 0.0}).is_stable());
}

TEST(Hinf, FirstOrderLag) {
  EXPECT_NEAR(hinf_norm(fixture::scalar_system({1.0}, {1.0, 1.0})).norm, 1.0, 1e-6);
  try {
    (void)hinf_norm(fixture::scalar_system({1.0}, {1.0, -1.0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnstable);
  }
}

TEST(Hinf, LightlyDampedPeakIsRefined) {
  // 1 / (s^2 + 0.1 s + 1): peak 1 / (0.1 sqrt(1 - 0.0025)) at w = sqrt(0.995).
  const double peak = 1.0 / (0.1 * std::sqrt(1.0 - 0.0025));
  const HinfResult h = hinf_norm(fixture::scalar_system({1.0}, {1.0, 0.1, 1.0}));
  EXPECT_NEAR(h.norm, peak, 1e-8 * peak);
  EXPECT_NEAR(h.peak_frequency, std::sqrt(0.995), 1e-4);
}

TEST(Hinf, BodeExampleMatchesDenseBcirc) {
  const LtiSystem g = fixture::bode_example();
  EXPECT_NEAR(hinf_norm(g).norm, dense_hinf(g), 1e-8);
}

TEST(PhaseEnvelope, StaticPositiveDefinite) {
  Rng rng = rng_for(1);
  const Tensor3 x = random_real_tensor(2, 2, 2, rng);
  const Tensor3 d = tprod(conj_transpose(x), x) + Tensor3::identity(2, 2);
  const PhaseEnvelope env = phase_envelope(LtiSystem::static_gain(d));
  EXPECT_NEAR(env.upper, 0.0, 1e-12);
  EXPECT_NEAR(env.lower, 0.0, 1e-12);
  EXPECT_TRUE(env.frequency_wise_sectorial());
}

TEST(PhaseEnvelope, BodeExampleEndpoints) {
  const PhaseEnvelope env = phase_envelope(fixture::bode_example());
  constexpr double kDeg = 180.0 / oracle::kPi;
  EXPECT_NEAR(env.lower * kDeg, -39.04, 0.5);
  EXPECT_NEAR(env.upper * kDeg, 19.74, 0.5);
  EXPECT_NEAR(env.spread() * kDeg, 58.8, 1.0);
  EXPECT_TRUE(env.frequency_wise_sectorial());
}

TEST(PhaseEnvelope, NegativeFrequencyMirror) {
  const LtiSystem g = fixture::bode_example();
  for (double w : {0.2, 1.3, 9.0}) {
    const auto pos = phase_extremes(g.fourier_response(Complex(0.0, w)));
    const auto neg = phase_extremes(g.fourier_response(Complex(0.0, -w)));
    ASSERT_TRUE(pos && neg);
    EXPECT_NEAR(neg->phi_max, -pos->phi_min, 1e-9);
  }
}

TEST(GangOfFour, ZeroController) {
  const LtiSystem g = fixture::bode_example();
  const GangOfFour gof = gang_of_four(g, LtiSystem::static_gain(Tensor3::zeros(2, 2, 2)));
  const Tensor3 r = gof.response(0.7);
  const Tensor3 gr = freq_response(g, 0.7);
  for (Index k = 0; k < 2; ++k) {
    EXPECT_LT((r.slice(k).block(0, 0, 2, 2) - (k == 0 ? CMatrix(CMatrix::Identity(2, 2)) : CMatrix(CMatrix::Zero(2, 2)))).norm(), 1e-14);
    EXPECT_LT(r.slice(k).block(0, 2, 2, 2).norm(), 1e-14);
    EXPECT_LT((r.slice(k).block(2, 0, 2, 2) - gr.slice(k)).norm(), 1e-14);
    EXPECT_LT(r.slice(k).block(2, 2, 2, 2).norm(), 1e-14);
  }
}

TEST(GangOfFour, ScalarSensitivity) {
  const GangOfFour gof = gang_of_four(fixture::scalar_system({1.0}, {1.0, 1.0}), fixture::static_scaled_identity(1.0, 1, 1));
  for (double w : {0.0, 0.5, 4.0}) {
    const Complex s(0.0, w);
    EXPECT_NEAR(std::abs(gof.response(w)(0, 0, 0) - (s + 1.0) / (s + 2.0)), 0.0, 1e-14);
  }
}

TEST(GangOfFour, PermutationSimilarToMatrixGangOfFour) {
  const LtiSystem g = fixture::bode_example();
  const LtiSystem h = fixture::static_scaled_identity(0.3, 2, 2);
  const GangOfFour gof = gang_of_four(g, h);
  for (double w : {0.0, 0.9, 5.0}) {
    const CMatrix bg = oracle::dense_bcirc(freq_response(g, w));
    const CMatrix bh = oracle::dense_bcirc(freq_response(h, w));
    const Index n = bg.rows();
    const CMatrix s = (CMatrix::Identity(n, n) + bh * bg).inverse();
    CMatrix dense(2 * n, 2 * n);
    dense << s, s * bh, bg * s, bg * s * bh;
    const std::vector<double> a = oracle::dense_singular_values(oracle::dense_bcirc(gof.response(w)));
    EXPECT_LT(oracle::max_abs_diff(a, oracle::dense_singular_values(dense)), 1e-9);
    EXPECT_LT(oracle::multiset_distance(oracle::dense_eigenvalues(oracle::dense_bcirc(gof.response(w))),
                                        oracle::dense_eigenvalues(dense)),
              1e-9);
  }
}

TEST(GangOfFour, IllPosed) {
  const LtiSystem g = fixture::static_scaled_identity(1.0, 1, 1);
  const LtiSystem h = fixture::static_scaled_identity(-1.0, 1, 1);
  try {
    (void)gang_of_four(g, h);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIllPosed);
  }
}

TEST(FeedbackStable, ScalarLoops) {
  const LtiSystem one = fixture::static_scaled_identity(1.0, 1, 1);
  EXPECT_TRUE(feedback_stable(fixture::scalar_system({1.0}, {1.0, 1.0}), one).stable);
  // (s - 1) + 2 = s + 1: the loop stabilises the unstable plant.
  const StabilityReport a = feedback_stable(fixture::scalar_system({2.0}, {1.0, -1.0}), one);
  ASSERT_EQ(a.poles.size(), 1u);
  EXPECT_NEAR(std::abs(a.poles[0] - Complex(-1.0)), 0.0, 1e-12);
  EXPECT_TRUE(a.stable);
  // (s - 1) + 0.5 = s - 0.5: still unstable.
  const StabilityReport b = feedback_stable(fixture::scalar_system({0.5}, {1.0, -1.0}), one);
  ASSERT_EQ(b.poles.size(), 1u);
  EXPECT_NEAR(std::abs(b.poles[0] - Complex(0.5)), 0.0, 1e-12);
  EXPECT_FALSE(b.stable);
  EXPECT_TRUE(feedback_stable(fixture::bode_example(), LtiSystem::static_gain(Tensor3::zeros(2, 2, 2))).stable);
}

TEST(SmallGain, Verdicts) {
  const LtiSystem g = fixture::bode_example();
  const double gn = hinf_norm(g).norm;
  const LtiSystem zero = LtiSystem::static_gain(Tensor3::zeros(2, 2, 2));
  EXPECT_EQ(small_gain_certificate(g, zero).verdict, Verdict::kCertified);

  // Both loops scaled to H-infinity norm 0.5.
  const LtiSystem h = LtiSystem::static_gain(Tensor3::identity(2, 2) * Complex(0.5));
  const auto& tf = std::get<RationalSliceTF>(g.repr());
  RationalSliceTF scaled = tf;
  for (auto& s : scaled.slices)
    for (auto& row : s)
      for (auto& e : row)
        for (auto& c : e.num) c *= 0.5 / gn;
  const Certificate c = small_gain_certificate(LtiSystem(scaled), h);
  EXPECT_EQ(c.verdict, Verdict::kCertified);
  EXPECT_NEAR(c.worst_value, 0.25, 1e-8);
  ASSERT_TRUE(c.loop.has_value());
  EXPECT_TRUE(c.loop->stable);

  // Gain 2 at w = 0 but the loop s + 3 is stable.
  const LtiSystem g2 = fixture::scalar_system({2.0}, {1.0, 1.0});
  const LtiSystem one = fixture::static_scaled_identity(1.0, 1, 1);
  const Certificate c2 = small_gain_certificate(g2, one);
  EXPECT_EQ(c2.verdict, Verdict::kInconclusive);
  EXPECT_FALSE(c2.offending_frequencies.empty());
  EXPECT_TRUE(feedback_stable(g2, one).stable);

  EXPECT_THROW((void)small_gain_certificate(fixture::scalar_system({1.0}, {1.0, -1.0}), one), Error);
}

TEST(SmallPhase, Verdicts) {
  const LtiSystem g = fixture::bode_example();
  const Certificate c = small_phase_certificate(g, fixture::static_scaled_identity(0.1, 2, 2));
  EXPECT_EQ(c.verdict, Verdict::kCertified);
  ASSERT_TRUE(c.loop.has_value());
  EXPECT_TRUE(c.loop->stable);
  EXPECT_NEAR(c.worst_value, oracle::kPi + phase_envelope(g).lower, 1e-6);

  const LtiSystem lag = fixture::scalar_system({1.0, 1.0}, {1.0, 2.0});
  EXPECT_EQ(small_phase_certificate(lag, fixture::static_scaled_identity(3.0, 1, 1)).verdict, Verdict::kCertified);

  // (s + 1)^2 / (s + 10)^2 has a phase lead of almost 1.92 rad near
  // w = sqrt(10); two of them exceed pi together.
  const LtiSystem lead = fixture::scalar_system({1.0, 2.0, 1.0}, {1.0, 20.0, 100.0});
  const Certificate c2 = small_phase_certificate(lead, lead);
  EXPECT_EQ(c2.verdict, Verdict::kInconclusive);
  EXPECT_LT(c2.worst_value, 0.0);
  EXPECT_NEAR(c2.worst_frequency, std::sqrt(10.0), 1e-3);

  const Certificate c3 = small_phase_certificate(g, LtiSystem::static_gain(Tensor3::zeros(2, 2, 2)));
  EXPECT_EQ(c3.verdict, Verdict::kAssumptionViolated);
  EXPECT_EQ(c3.offending_frequencies.size(), FrequencyGrid{}.all_points().size());
  EXPECT_EQ(to_string(c3.verdict), "assumption-violated");
}

TEST(BodeCsv, FormatContract) {
  FrequencyGrid grid;
  grid.points = 25;
  const std::string csv = bode_csv(fixture::bode_example(), grid);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "omega_rad_s,sigma_max,sigma_min,phi_max_deg,phi_min_deg,sectorial");
  int rows = 0;
  std::string last;
  while (std::getline(in, line)) {
    ++rows;
    last = line;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 5);
  }
  EXPECT_EQ(rows, 25 + 2);
  EXPECT_EQ(last.rfind("inf,", 0), 0u);

  const std::string s = bode_csv(LtiSystem::static_gain(Tensor3::identity(1, 1) * Complex(2.0)), grid);
  EXPECT_NE(s.find("\n0,2,2,"), std::string::npos);
  EXPECT_EQ(s, bode_csv(LtiSystem::static_gain(Tensor3::identity(1, 1) * Complex(2.0)), grid));
}
