#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "cli.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "tphase/approx.hpp"
#include "tphase/geomean.hpp"
#include "tphase/io.hpp"
#include "tphase/random.hpp"

using namespace tphase;
using nlohmann::json;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const char* env = std::getenv("TPHASE_TEST_TMP");
  const std::filesystem::path dir = env ? std::filesystem::path(env) : std::filesystem::temp_directory_path() / "tphase_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

struct Outcome {
  int code;
  std::string out;
  std::string err;
  [[nodiscard]] json report() const { return json::parse(out); }
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string write_tensor(const Tensor3& t, const std::string& name) {
  const auto path = scratch(name);
  io::write_ttj(t, path);
  return path.string();
}

std::vector<double> numbers(const json& j) { return j.get<std::vector<double>>(); }

}  // namespace

TEST(CliInfo, PaperExample) {
  const Outcome o = run({"info", write_tensor(fixture::phase_rank_example(), "example.ttj")});
  ASSERT_EQ(o.code, 0) << o.err;
  const json r = o.report();
  EXPECT_LT(oracle::max_abs_diff(numbers(r["canonical_phases"]), {0.6, 0.4, 0.3, 0.2, 0.1, 0.05}), 1e-10);
  EXPECT_EQ(r["tprank"], 6);
  EXPECT_EQ(r["p"], 3);
  EXPECT_TRUE(r["sector"]["accretive"].get<bool>());
}

TEST(CliInfo, IdentityAndErrors) {
  const Outcome o = run({"info", write_tensor(Tensor3::identity(2, 2), "identity.ttj")});
  ASSERT_EQ(o.code, 0);
  for (double v : numbers(o.report()["canonical_phases"])) EXPECT_NEAR(v, 0.0, 1e-14);

  const auto bad = scratch("malformed.ttj");
  io::write_text_atomic(bad, R"({"m":2,"n":2,"p":1,"data":[[[[1,0]]]]})");
  const Outcome e = run({"info", bad.string()});
  EXPECT_EQ(e.code, 2);
  EXPECT_NE(e.err.find("Format"), std::string::npos);
  EXPECT_EQ(run({"info", scratch("missing.ttj").string()}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(CliTruncate, PaperExampleSidecar) {
  const std::string in = write_tensor(fixture::phase_rank_example(), "example_t.ttj");
  const auto out = scratch("example_E.ttj");
  const Outcome o = run({"truncate", in, "--r", "3", "--gauge", "kyfan:3", "--out", out.string()});
  ASSERT_EQ(o.code, 0) << o.err;
  const json side = json::parse(io::read_text(scratch("example_E.json")));
  EXPECT_LT(oracle::max_abs_diff(numbers(side["residual_phases"]), {0.2, 0.1, 0.05}), 1e-10);
  EXPECT_NEAR(side["optimal_value"].get<double>(), 0.35, 1e-10);
  EXPECT_EQ(side["gauge"], "kyfan:3");
  EXPECT_EQ(side["r"], 3);
  EXPECT_EQ(side["kept_phases"].size(), 3u);
  EXPECT_EQ(tprank(io::read_ttj(out)), 3);
}

TEST(CliTruncate, ExtremeRanks) {
  const std::string in = write_tensor(fixture::phase_rank_example(), "example_r.ttj");
  const json r0 = run({"truncate", in, "--r", "0"}).report();
  EXPECT_LT(oracle::max_abs_diff(numbers(r0["residual_tensor_phases"]), numbers(r0["input_phases"])), 1e-8);
  const json r6 = run({"truncate", in, "--r", "6"}).report();
  EXPECT_EQ(r6["optimal_value"].get<double>(), 0.0);
  EXPECT_NEAR(r6["attained_value"].get<double>(), 0.0, 1e-8);
}

TEST(CliTruncate, AnalysisFailureExitsOne) {
  const std::string in = write_tensor(fixture::diagonal_fourier_tensor({{0.4, -0.3}}), "lower_half.ttj");
  const Outcome o = run({"truncate", in, "--r", "1"});
  EXPECT_EQ(o.code, 1);
  EXPECT_NE(o.err.find("NotInSector"), std::string::npos);
  EXPECT_EQ(run({"truncate", in, "--r", "1", "--gauge", "kyfan:0"}).code, 2);
}

TEST(CliTsvd, ValuesAgainstDenseOracle) {
  Rng rng(derive_seed(7008, 0));
  const Tensor3 a = random_tensor(2, 3, 3, rng);
  const std::string in = write_tensor(a, "tsvd.ttj");
  const json full = run({"tsvd", in, "--r", "6"}).report();
  EXPECT_NEAR(full["optimal_value"].get<double>(), 0.0, 1e-12);
  const json none = run({"tsvd", in, "--r", "0"}).report();
  EXPECT_NEAR(none["frobenius_error"].get<double>(), a.frobenius_norm(), 1e-12);
  const std::vector<double> s = oracle::dense_singular_values(oracle::dense_bcirc(a));
  const json r2 = run({"tsvd", in, "--r", "2", "--gauge", "kyfan:2"}).report();
  EXPECT_NEAR(r2["optimal_value"].get<double>(), s[2] + s[3], 1e-10);
}

TEST(CliGeomean, AgainstSquareRoot) {
  Rng rng(derive_seed(7008, 1));
  const Tensor3 a = random_accretive(2, 3, rng);
  const auto out = scratch("mean.ttj");
  const Outcome o = run({"geomean", write_tensor(a, "ga.ttj"), write_tensor(Tensor3::identity(2, 3), "gi.ttj"), "--out", out.string()});
  ASSERT_EQ(o.code, 0) << o.err;
  const json r = o.report();
  EXPECT_LT(r["riccati_residual"].get<double>(), 1e-9);
  EXPECT_TRUE(r["all_hold"].get<bool>());
  EXPECT_LT(oracle::rel_err(io::read_ttj(out), t_power(a, 0.5)), 1e-10);
  EXPECT_EQ(run({"geomean", write_tensor(a, "ga2.ttj")}).code, 2);
}

TEST(CliLti, BodeExampleAndCertificates) {
  const auto sys = scratch("bode.tlj");
  io::write_tlj(fixture::bode_example(), sys);
  const auto csv = scratch("bode.csv");
  const Outcome o = run({"lti", sys.string(), "--certify", "gain", "--csv", csv.string()});
  ASSERT_EQ(o.code, 0) << o.err;
  const json r = o.report();
  EXPECT_NEAR(r["envelope"]["lower_deg"].get<double>(), -39.04, 0.5);
  EXPECT_NEAR(r["envelope"]["upper_deg"].get<double>(), 19.74, 0.5);
  EXPECT_EQ(r["certificate"]["verdict"], "certified");
  EXPECT_TRUE(r["certificate"]["closed_loop"]["stable"].get<bool>());
  EXPECT_EQ(io::read_text(csv).rfind("omega_rad_s,", 0), 0u);

  const auto h = scratch("h.tlj");
  io::write_tlj(fixture::static_scaled_identity(0.1, 2, 2), h);
  const json rp = run({"lti", sys.string(), "--with", h.string(), "--certify", "phase", "--grid-points", "50"}).report();
  EXPECT_EQ(rp["certificate"]["verdict"], "certified");
  EXPECT_NE(rp["grid"].get<std::string>().find("50 log-spaced"), std::string::npos);
}

TEST(CliLti, ScalarLoopAndUnstable) {
  const auto g = scratch("lag.tlj");
  io::write_tlj(fixture::scalar_system({1.0}, {1.0, 1.0}), g);
  const auto one = scratch("one.tlj");
  io::write_tlj(fixture::static_scaled_identity(1.0, 1, 1), one);
  const json r = run({"lti", g.string(), "--with", one.string(), "--certify", "gain"}).report();
  EXPECT_NEAR(r["hinf"]["norm"].get<double>(), 1.0, 1e-6);
  EXPECT_EQ(r["certificate"]["verdict"], "inconclusive");

  const auto u = scratch("unstable.tlj");
  io::write_tlj(fixture::scalar_system({1.0}, {1.0, -1.0}), u);
  const Outcome o = run({"lti", u.string()});
  EXPECT_EQ(o.code, 1);
  EXPECT_NE(o.err.find("Unstable"), std::string::npos);
  EXPECT_EQ(run({"lti", g.string(), "--certify", "maybe"}).code, 2);
}

TEST(CliVerify, SuitesPassAndReproduce) {
  const Outcome o = run({"verify", "--trials", "3"});
  ASSERT_EQ(o.code, 0) << o.out;
  EXPECT_TRUE(o.report()["passed"].get<bool>());
  EXPECT_GE(o.report()["checks"].size(), 9u);

  const Outcome c1 = run({"verify", "--suite", "conjecture", "--trials", "20", "--seed", "5"});
  const Outcome c2 = run({"verify", "--suite", "conjecture", "--trials", "20", "--seed", "5"});
  ASSERT_EQ(c1.code, 0);
  EXPECT_EQ(c1.out, c2.out);
  const json r = c1.report();
  for (const char* k : {"trials", "seed", "max_violation", "worst_pair_files"}) EXPECT_TRUE(r.contains(k)) << k;
  EXPECT_EQ(run({"verify", "--suite", "nonsense"}).code, 2);
}

TEST(RunConfig, RoundTripsToCanonicalForm) {
  cli::RunConfig c;
  c.command = "truncate";
  c.inputs = {"a.ttj"};
  c.r = 2;
  c.gauge = "fro";
  c.grid.points = 17;
  const cli::RunConfig n = c.normalized();
  EXPECT_EQ(n.gauge, "lp:2");
  const cli::RunConfig back = cli::config_from_json(cli::to_json(n));
  EXPECT_EQ(back, n);
  EXPECT_EQ(back.normalized(), n);
  EXPECT_EQ(cli::to_json(back).dump(), cli::to_json(n).dump());

  json bad = cli::to_json(n);
  bad["colour"] = "blue";
  EXPECT_THROW((void)cli::config_from_json(bad), Error);
  json bad_grid = cli::to_json(n);
  bad_grid["grid"]["density"] = 3;
  EXPECT_THROW((void)cli::config_from_json(bad_grid), Error);
  json ill = cli::to_json(n);
  ill["trials"] = "many";
  EXPECT_THROW((void)cli::config_from_json(ill), Error);
}

TEST(RunConfig, DefaultsPerCommand) {
  cli::RunConfig c;
  c.command = "tsvd";
  c.inputs = {"x.ttj"};
  EXPECT_EQ(c.normalized().gauge, "lp:2");
  c.command = "truncate";
  EXPECT_EQ(c.normalized().gauge, "lp:1");
  c.command = "geomean";
  EXPECT_THROW((void)c.normalized(), Error);
}

TEST(RunConfig, ConfigFileAndPrintConfig) {
  const std::string in = write_tensor(fixture::phase_rank_example(), "cfg_example.ttj");
  const Outcome p = run({"--print-config", "truncate", in, "--r", "3"});
  ASSERT_EQ(p.code, 0) << p.err;
  const auto cfg = scratch("run.json");
  io::write_text_atomic(cfg, p.out);
  const Outcome o = run({"--config", cfg.string(), "info", "ignored.ttj"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_NEAR(o.report()["optimal_value"].get<double>(), optimal_tprank_value(fixture::phase_rank_example(), 3, GaugeSpec::lp(1.0)), 1e-12);

  io::write_text_atomic(cfg, R"({"command":"info","bogus":1})");
  EXPECT_EQ(run({"--config", cfg.string(), "info", "x"}).code, 2);
}
