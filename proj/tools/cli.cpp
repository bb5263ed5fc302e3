#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>

#include <CLI11.hpp>

#include "tphase/approx.hpp"
#include "tphase/geomean.hpp"
#include "tphase/io.hpp"
#include "tphase/lti.hpp"
#include "tphase/matrix_kernels.hpp"
#include "tphase/phase.hpp"
#include "tphase/random.hpp"

namespace tphase::cli {

using nlohmann::json;

namespace {

const std::vector<std::string> kCommands{"info", "truncate", "tsvd", "geomean", "lti", "verify"};

[[noreturn]] void format_error(const std::string& what) { throw Error(ErrorCode::kFormat, what); }

json complex_list(const std::vector<Complex>& zs) {
  json a = json::array();
  for (const auto& z : zs) a.push_back({z.real(), z.imag()});
  return a;
}

// JSON has no infinity; such values become null.
json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json phase_json(const PhaseVector& p) { return p.values; }

FrequencyGrid to_grid(const GridConfig& g) { return {g.lo, g.hi, g.points, g.refine}; }

void write_sidecar(const std::string& path, const json& j) {
  if (!path.empty()) io::write_text_atomic(path, j.dump(2) + "\n");
}

std::string default_sidecar(const std::string& out) {
  if (out.empty()) return {};
  std::filesystem::path p(out);
  p.replace_extension(".json");
  return p.string();
}

json sector_json(const SectorClass& c) {
  return {{"alpha", c.alpha},
          {"beta", c.beta},
          {"quasi_sectorial", c.quasi_sectorial},
          {"semi_sectorial", c.semi_sectorial},
          {"accretive", c.accretive},
          {"negative_imaginary", c.negative_imaginary},
          {"positive_imaginary", c.positive_imaginary}};
}

json majorization_json(const MajorizationReport& r) {
  json j{{"lhs", r.lhs}, {"rhs", r.rhs}, {"holds", r.result.holds}, {"max_violation", r.result.max_violation}};
  j["violated_prefix"] = r.result.violated_prefix ? json(*r.result.violated_prefix) : json(nullptr);
  return j;
}

json certificate_json(const Certificate& c) {
  json j{{"verdict", std::string(to_string(c.verdict))},
         {"condition", c.condition},
         {"worst_value", finite_or_null(c.worst_value)},
         {"worst_frequency", finite_or_null(c.worst_frequency)},
         {"worst_frequency_is_infinity", std::isinf(c.worst_frequency)},
         {"grid_note", c.grid_note}};
  json off = json::array();
  for (double w : c.offending_frequencies) off.push_back(finite_or_null(w));
  j["offending_frequencies"] = off;
  if (c.loop) {
    j["closed_loop"] = {{"stable", c.loop->stable},
                        {"spectral_abscissa", finite_or_null(c.loop->spectral_abscissa)},
                        {"poles", complex_list(c.loop->poles)}};
  } else {
    j["closed_loop"] = nullptr;
  }
  return j;
}

// ---------------------------------------------------------------- commands

int cmd_info(const RunConfig& c, std::ostream& out) {
  const Tensor3 a = io::read_ttj(c.inputs.at(0));
  json rep{{"m", a.rows()}, {"n", a.cols()}, {"p", a.tubes()}};
  rep["t_singular_values"] = t_svd(a).sigma;
  if (a.frontal_square()) {
    const SectorialityMargin sm = sectoriality_margin(a);
    rep["sectoriality"] = {{"gamma", sm.gamma}, {"margin", sm.margin}, {"scale", sm.scale}, {"sectorial", sm.sectorial()}};
    rep["canonical_phases"] = nullptr;
    rep["tprank"] = nullptr;
    rep["sector"] = nullptr;
    if (sm.sectorial()) {
      try {
        const PhaseVector ph = canonical_phases(a);
        rep["canonical_phases"] = phase_json(ph);
        rep["tprank"] = tprank(ph);
        rep["sector"] = sector_json(classify_sector(ph));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kBranchSpread) throw;
        rep["phase_error"] = e.what();
      }
    }
  }
  out << rep.dump(2) << "\n";
  return kExitOk;
}

int cmd_truncate(const RunConfig& c, std::ostream& out) {
  const Tensor3 a = io::read_ttj(c.inputs.at(0));
  if (!c.r) throw Error(ErrorCode::kInvalidArgument, "truncate needs --r");
  const GaugeSpec psi = GaugeSpec::parse(c.gauge);
  const HalfPhaseTruncation t = half_phase_truncate(a, *c.r);
  const PhaseVector pw = canonical_phases(phase_residual(a, t.E));
  json kept = json::array();
  for (std::size_t i = 0; i < t.kept_phases.size(); ++i) {
    kept.push_back({{"phase", t.kept_phases[i]}, {"slice", t.kept_sources[i].slice}, {"in_slice", t.kept_sources[i].in_slice}});
  }
  json rep{{"r", t.r},
           {"gauge", psi.to_string()},
           {"kept_phases", kept},
           {"residual_phases", t.residual_phases},
           {"input_phases", phase_json(t.input_phases)},
           {"optimal_value", optimal_tprank_value(t.input_phases, t.r, psi)},
           {"attained_value", gauge_eval(psi, pw.values)},
           {"residual_tensor_phases", phase_json(pw)},
           {"tprank_E", tprank(t.E)}};
  if (!c.out.empty()) {
    io::write_ttj(t.E, c.out);
    rep["output"] = c.out;
    write_sidecar(c.sidecar.empty() ? default_sidecar(c.out) : c.sidecar, rep);
  } else {
    write_sidecar(c.sidecar, rep);
  }
  out << rep.dump(2) << "\n";
  return kExitOk;
}

int cmd_tsvd(const RunConfig& c, std::ostream& out) {
  const Tensor3 a = io::read_ttj(c.inputs.at(0));
  if (!c.r) throw Error(ErrorCode::kInvalidArgument, "tsvd needs --r");
  const GaugeSpec psi = GaugeSpec::parse(c.gauge);
  const RankTruncation t = truncate_rank(a, *c.r, psi);
  json rep{{"r", t.r},
           {"gauge", psi.to_string()},
           {"optimal_value", t.optimal_value},
           {"frobenius_error", t.frobenius_error},
           {"t_singular_values", t_svd(a).sigma}};
  if (!c.out.empty()) {
    io::write_ttj(t.E, c.out);
    rep["output"] = c.out;
  }
  write_sidecar(c.sidecar, rep);
  out << rep.dump(2) << "\n";
  return kExitOk;
}

int cmd_geomean(const RunConfig& c, std::ostream& out) {
  const Tensor3 a = io::read_ttj(c.inputs.at(0));
  const Tensor3 b = io::read_ttj(c.inputs.at(1));
  const Tensor3 m = t_geomean(a, b);
  const PhaseMajorizationReport pm = check_phase_majorization(a, b, {}, c.tol);
  json gauges = json::array();
  for (const auto& g : pm.gauges) {
    gauges.push_back({{"gauge", g.gauge.to_string()}, {"mean_value", g.mean_value}, {"bound", g.bound}, {"holds", g.holds}});
  }
  json rep{{"riccati_residual", riccati_residual(m, a, b)},
           {"symmetry_defect", (m - t_geomean(b, a)).frobenius_norm() / std::max(m.frobenius_norm(), 1e-300)},
           {"phase_majorization", majorization_json(pm.theorem)},
           {"square_root_corollary", majorization_json(pm.square_root)},
           {"gauge_subadditivity", gauges},
           {"all_hold", pm.holds()}};
  if (!c.out.empty()) {
    io::write_ttj(m, c.out);
    rep["output"] = c.out;
  }
  write_sidecar(c.sidecar, rep);
  out << rep.dump(2) << "\n";
  return kExitOk;
}

int cmd_lti(const RunConfig& c, std::ostream& out) {
  const LtiSystem g = io::read_tlj(c.inputs.at(0));
  const FrequencyGrid grid = to_grid(c.grid);
  constexpr double kDeg = 180.0 / 3.14159265358979323846;
  json rep{{"grid", grid.describe()}, {"stable", g.is_stable()}, {"poles", complex_list(g.poles())}};
  if (!g.is_stable()) throw Error(ErrorCode::kUnstable, "the system is not in RH-infinity; frequency analysis refused");
  const HinfResult h = hinf_norm(g, grid);
  rep["hinf"] = {{"norm", h.norm}, {"peak_frequency", finite_or_null(h.peak_frequency)}};
  const PhaseEnvelope env = phase_envelope(g, grid);
  rep["envelope"] = {{"lower", finite_or_null(env.lower)},
                     {"upper", finite_or_null(env.upper)},
                     {"lower_deg", finite_or_null(env.lower * kDeg)},
                     {"upper_deg", finite_or_null(env.upper * kDeg)},
                     {"spread_deg", finite_or_null(env.spread() * kDeg)},
                     {"frequency_wise_sectorial", env.frequency_wise_sectorial()}};
  if (!c.csv.empty()) {
    bode_export(g, grid, c.csv);
    rep["csv"] = c.csv;
  }
  if (!c.certify.empty()) {
    const LtiSystem hsys = c.with.empty() ? LtiSystem::static_gain(Tensor3(g.size(), g.size(), g.tubes()))
                                          : io::read_tlj(c.with);
    const Certificate cert = c.certify == "gain" ? small_gain_certificate(g, hsys, grid)
                                                 : small_phase_certificate(g, hsys, grid);
    rep["certificate"] = certificate_json(cert);
    rep["certificate"]["kind"] = c.certify == "gain" ? "small-gain" : "small-phase";
  }
  write_sidecar(c.sidecar, rep);
  out << rep.dump(2) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- verify

struct Check {
  std::string name;
  bool passed = true;
  double worst = 0.0;
  double tol = 0.0;
  int trials = 0;
};

Check run_check(const std::string& name, double tol, int trials, std::uint64_t seed,
                const std::function<double(Rng&)>& trial) {
  Check c{name, true, 0.0, tol, trials};
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    c.worst = std::max(c.worst, trial(rng));
  }
  c.passed = c.worst <= tol;
  return c;
}

Index draw(Rng& rng, Index lo, Index hi) { return std::uniform_int_distribution<Index>(lo, hi)(rng); }

double rel(const CMatrix& x, const CMatrix& y) { return (x - y).norm() / std::max(y.norm(), 1e-300); }

std::vector<Check> suite_bcirc(const RunConfig& c) {
  std::vector<Check> out;
  out.push_back(run_check("bcirc_product", 1e-12, c.trials, c.seed, [](Rng& rng) {
    const Index p = draw(rng, 1, 4);
    const Tensor3 a = random_tensor(2, 3, p, rng);
    const Tensor3 b = random_tensor(3, 2, p, rng);
    return rel(bcirc(tprod(a, b)), bcirc(a) * bcirc(b));
  }));
  out.push_back(run_check("bcirc_conj_transpose", 1e-12, c.trials, c.seed + 1, [](Rng& rng) {
    const Tensor3 a = random_tensor(3, 2, draw(rng, 1, 4), rng);
    return rel(bcirc(conj_transpose(a)), bcirc(a).adjoint());
  }));
  out.push_back(run_check("bcirc_inverse", 1e-10, c.trials, c.seed + 2, [](Rng& rng) {
    const Tensor3 a = random_nonsingular(draw(rng, 1, 3), draw(rng, 1, 4), rng);
    return rel(bcirc(t_inverse(a)), bcirc(a).inverse());
  }));
  out.push_back(run_check("fourier_norm_identity", 1e-12, c.trials, c.seed + 3, [](Rng& rng) {
    const Tensor3 a = random_tensor(draw(rng, 1, 3), draw(rng, 1, 3), draw(rng, 1, 5), rng);
    double s = 0.0;
    for (const auto& f : to_fourier(a).slices) s += f.squaredNorm();
    const double lhs = a.frobenius_norm() * a.frobenius_norm();
    return std::abs(lhs - s / static_cast<double>(a.tubes())) / lhs;
  }));
  return out;
}

std::vector<Check> suite_majorization(const RunConfig& c) {
  std::vector<Check> out;
  out.push_back(run_check("kyfan_eigenvalues", c.tol, c.trials, c.seed + 10, [&](Rng& rng) {
    const Index n = draw(rng, 1, 3);
    const Index p = draw(rng, 1, 3);
    const Tensor3 x = random_hermitian(n, p, rng);
    const Tensor3 y = random_hermitian(n, p, rng);
    return std::max(0.0, check_kyfan_eig(x, y, c.tol).result.max_violation);
  }));
  out.push_back(run_check("lidskii_eigenvalues", c.tol, c.trials, c.seed + 11, [&](Rng& rng) {
    const Index n = draw(rng, 1, 3);
    const Index p = draw(rng, 1, 3);
    const Tensor3 x = random_hermitian(n, p, rng);
    const Tensor3 y = random_hermitian(n, p, rng);
    return std::max(0.0, check_lidskii_eig(x, y, c.tol).result.max_violation);
  }));
  out.push_back(run_check("geomean_phase_majorization", c.tol, c.trials, c.seed + 12, [&](Rng& rng) {
    const Index n = draw(rng, 1, 3);
    const Index p = draw(rng, 1, 3);
    const Tensor3 a = random_accretive(n, p, rng);
    const Tensor3 b = random_accretive(n, p, rng);
    const PhaseMajorizationReport r = check_phase_majorization(a, b, {}, c.tol);
    double worst = std::max(r.theorem.result.max_violation, r.square_root.result.max_violation);
    for (const auto& g : r.gauges) worst = std::max(worst, g.mean_value - g.bound);
    return std::max(0.0, worst);
  }));
  return out;
}

std::vector<Check> suite_oracles(const RunConfig& c) {
  std::vector<Check> out;
  out.push_back(run_check("geomean_vs_quadrature", 1e-6, std::min(c.trials, 20), c.seed + 20, [](Rng& rng) {
    const Index n = draw(rng, 1, 3);
    const Index p = draw(rng, 1, 3);
    const Tensor3 a = random_accretive(n, p, rng);
    const Tensor3 b = random_accretive(n, p, rng);
    return rel(bcirc(t_geomean(a, b)), matrix_geomean_integral_oracle(bcirc(a), bcirc(b)));
  }));
  out.push_back(run_check("tsvd_vs_dense_svd", 1e-10, c.trials, c.seed + 21, [](Rng& rng) {
    const Tensor3 a = random_tensor(draw(rng, 1, 3), draw(rng, 1, 3), draw(rng, 1, 4), rng);
    const std::vector<double> s = t_svd(a).sigma;
    Eigen::JacobiSVD<CMatrix> svd(bcirc(a));
    double worst = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      worst = std::max(worst, std::abs(s[i] - svd.singularValues()(static_cast<Index>(i))));
    }
    return worst / std::max(s.front(), 1e-300);
  }));
  out.push_back(run_check("phases_vs_dense_bcirc", 1e-9, c.trials, c.seed + 22, [](Rng& rng) {
    const Tensor3 a = random_sectorial(draw(rng, 1, 3), draw(rng, 1, 3), -0.4, 1.9, rng);
    const std::vector<double> ph = canonical_phases(a).values;
    const SectorialFactorizationM dense = sectorial_decompose_matrix(bcirc(a));
    double worst = 0.0;
    for (std::size_t i = 0; i < ph.size(); ++i) worst = std::max(worst, std::abs(ph[i] - dense.phases(static_cast<Index>(i))));
    return worst;
  }));
  return out;
}

int cmd_verify(const RunConfig& c, std::ostream& out) {
  if (c.suite == "conjecture") {
    const ProbeReport r = probe_phase_lidskii(c.trials, c.seed, {}, c.tol);
    json files = json::array();
    if (!c.out_dir.empty() && r.worst_trial >= 0) {
      const std::filesystem::path dir(c.out_dir);
      std::filesystem::create_directories(dir);
      io::write_ttj(r.worst_a, dir / "worst_a.ttj");
      io::write_ttj(r.worst_b, dir / "worst_b.ttj");
      files.push_back((dir / "worst_a.ttj").string());
      files.push_back((dir / "worst_b.ttj").string());
    }
    json rep{{"suite", "conjecture"},
             {"trials", r.trials},
             {"seed", r.seed},
             {"tol", r.tol},
             {"max_violation", r.max_violation},
             {"violations", r.violations},
             {"worst_trial", r.worst_trial},
             {"worst_trial_seed", r.worst_trial_seed},
             {"worst_pair_files", files},
             {"note", "sampling report only; the inequality is not asserted"}};
    write_sidecar(c.sidecar, rep);
    out << rep.dump(2) << "\n";
    return kExitOk;
  }
  std::vector<Check> checks;
  auto add = [&](std::vector<Check> more) { checks.insert(checks.end(), more.begin(), more.end()); };
  if (c.suite == "bcirc" || c.suite == "default") add(suite_bcirc(c));
  if (c.suite == "majorization" || c.suite == "default") add(suite_majorization(c));
  if (c.suite == "oracles" || c.suite == "default") add(suite_oracles(c));
  bool all = true;
  json arr = json::array();
  for (const auto& ch : checks) {
    all = all && ch.passed;
    arr.push_back({{"name", ch.name}, {"passed", ch.passed}, {"worst", ch.worst}, {"tol", ch.tol}, {"trials", ch.trials}});
  }
  json rep{{"suite", c.suite}, {"seed", c.seed}, {"checks", arr}, {"passed", all}};
  write_sidecar(c.sidecar, rep);
  out << rep.dump(2) << "\n";
  return all ? kExitOk : kExitAnalysis;
}

}  // namespace

const std::vector<std::string>& verify_suites() {
  static const std::vector<std::string> suites{"default", "bcirc", "majorization", "oracles", "conjecture"};
  return suites;
}

RunConfig RunConfig::normalized() const {
  RunConfig c = *this;
  if (std::find(kCommands.begin(), kCommands.end(), c.command) == kCommands.end()) {
    throw Error(ErrorCode::kInvalidArgument, "unknown command '" + c.command + "'");
  }
  if (c.gauge.empty()) c.gauge = c.command == "tsvd" ? "lp:2" : "l1";
  c.gauge = GaugeSpec::parse(c.gauge).to_string();
  const auto& suites = verify_suites();
  if (std::find(suites.begin(), suites.end(), c.suite) == suites.end()) {
    throw Error(ErrorCode::kInvalidArgument, "unknown suite '" + c.suite + "'");
  }
  if (!c.certify.empty() && c.certify != "gain" && c.certify != "phase") {
    throw Error(ErrorCode::kInvalidArgument, "--certify must be gain or phase");
  }
  if (!(c.grid.lo > 0.0) || !(c.grid.hi >= c.grid.lo) || c.grid.points < 1) {
    throw Error(ErrorCode::kInvalidArgument, "grid needs 0 < lo <= hi and points >= 1");
  }
  if (c.trials < 0) throw Error(ErrorCode::kInvalidArgument, "trials must be >= 0");
  if (!(c.tol >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "tol must be >= 0");
  std::size_t need = 0;
  if (c.command == "geomean") {
    need = 2;
  } else if (c.command != "verify") {
    need = 1;
  }
  if (c.inputs.size() != need) {
    throw Error(ErrorCode::kInvalidArgument, c.command + " expects " + std::to_string(need) + " input file(s)");
  }
  return c;
}

json to_json(const RunConfig& c) {
  return {{"command", c.command},
          {"inputs", c.inputs},
          {"r", c.r ? json(*c.r) : json(nullptr)},
          {"gauge", c.gauge},
          {"grid", {{"lo", c.grid.lo}, {"hi", c.grid.hi}, {"points", c.grid.points}, {"refine", c.grid.refine}}},
          {"seed", c.seed},
          {"trials", c.trials},
          {"tol", c.tol},
          {"suite", c.suite},
          {"with", c.with},
          {"certify", c.certify},
          {"out", c.out},
          {"sidecar", c.sidecar},
          {"csv", c.csv},
          {"out_dir", c.out_dir}};
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) format_error("config must be a JSON object");
  static const std::vector<std::string> keys{"command", "inputs", "r", "gauge", "grid", "seed", "trials", "tol",
                                             "suite", "with", "certify", "out", "sidecar", "csv", "out_dir"};
  for (const auto& item : j.items()) {
    if (std::find(keys.begin(), keys.end(), item.key()) == keys.end()) format_error("unknown config key '" + item.key() + "'");
  }
  RunConfig c;
  try {
    auto str = [&](const char* k, std::string& dst) {
      if (j.contains(k)) dst = j.at(k).get<std::string>();
    };
    str("command", c.command);
    str("gauge", c.gauge);
    str("suite", c.suite);
    str("with", c.with);
    str("certify", c.certify);
    str("out", c.out);
    str("sidecar", c.sidecar);
    str("csv", c.csv);
    str("out_dir", c.out_dir);
    if (j.contains("inputs")) c.inputs = j.at("inputs").get<std::vector<std::string>>();
    if (j.contains("r") && !j.at("r").is_null()) c.r = j.at("r").get<int>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("trials")) c.trials = j.at("trials").get<int>();
    if (j.contains("tol")) c.tol = j.at("tol").get<double>();
    if (j.contains("grid")) {
      const json& g = j.at("grid");
      if (!g.is_object()) format_error("'grid' must be an object");
      for (const auto& item : g.items()) {
        if (item.key() != "lo" && item.key() != "hi" && item.key() != "points" && item.key() != "refine") {
          format_error("unknown grid key '" + item.key() + "'");
        }
      }
      if (g.contains("lo")) c.grid.lo = g.at("lo").get<double>();
      if (g.contains("hi")) c.grid.hi = g.at("hi").get<double>();
      if (g.contains("points")) c.grid.points = g.at("points").get<int>();
      if (g.contains("refine")) c.grid.refine = g.at("refine").get<bool>();
    }
  } catch (const json::exception& e) {
    format_error(std::string("ill-typed config value: ") + e.what());
  }
  return c;
}

int execute(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig c = config.normalized();
    if (c.command == "info") return cmd_info(c, out);
    if (c.command == "truncate") return cmd_truncate(c, out);
    if (c.command == "tsvd") return cmd_tsvd(c, out);
    if (c.command == "geomean") return cmd_geomean(c, out);
    if (c.command == "lti") return cmd_lti(c, out);
    return cmd_verify(c, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::kFormat:
      case ErrorCode::kInvalidArgument:
      case ErrorCode::kIo:
        return kExitUsage;
      default:
        return kExitAnalysis;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitAnalysis;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"tphase: canonical T-phases, geometric means and phase-based certificates for third-order tensors"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  RunConfig c;
  std::string config_path;
  bool print_config = false;
  std::string gauge_help = "Gauge: kyfan:K, lp:P, l1, l2, fro, linf or weighted:w1,w2,...";

  app.add_option("--config", config_path, "Read the run configuration from a JSON file (other flags are ignored)");
  app.add_flag("--print-config", print_config, "Print the normalized configuration and exit");

  auto add_sidecar = [&](CLI::App* s) { s->add_option("--sidecar", c.sidecar, "Also write the JSON report here"); };
  auto add_grid = [&](CLI::App* s) {
    s->add_option("--grid-lo", c.grid.lo, "Lowest log-grid frequency in rad/s")->capture_default_str();
    s->add_option("--grid-hi", c.grid.hi, "Highest log-grid frequency in rad/s")->capture_default_str();
    s->add_option("--grid-points", c.grid.points, "Number of log-spaced points")->capture_default_str();
    s->add_flag("!--no-refine", c.grid.refine, "Disable golden-section refinement around extrema");
  };

  auto* info = app.add_subcommand("info", "Dimensions, sectoriality margin, sector class, canonical phases, T-singular values");
  info->add_option("tensor", c.inputs, "Input .ttj tensor")->required()->expected(1);

  auto* trunc = app.add_subcommand("truncate", "Half-phase truncation: low T-phase-rank approximation");
  trunc->add_option("tensor", c.inputs, "Input .ttj tensor in C[0, pi)")->required()->expected(1);
  trunc->add_option("--r", c.r, "Number of leading phases to remove")->required();
  trunc->add_option("--gauge", c.gauge, gauge_help + " (default l1)");
  trunc->add_option("--out", c.out, "Write the truncation tensor E here (.ttj); the sidecar goes next to it");
  add_sidecar(trunc);

  auto* tsvd = app.add_subcommand("tsvd", "Best T-rank-r approximation by T-SVD truncation");
  tsvd->add_option("tensor", c.inputs, "Input .ttj tensor")->required()->expected(1);
  tsvd->add_option("--r", c.r, "Number of T-singular values to keep")->required();
  tsvd->add_option("--gauge", c.gauge, gauge_help + " (default lp:2)");
  tsvd->add_option("--out", c.out, "Write the truncated tensor here (.ttj)");
  add_sidecar(tsvd);

  auto* gm = app.add_subcommand("geomean", "Geometric mean A # B with Riccati residual and phase-majorization report");
  gm->add_option("tensors", c.inputs, "Input .ttj tensors A and B")->required()->expected(2);
  gm->add_option("--out", c.out, "Write A # B here (.ttj)");
  gm->add_option("--tol", c.tol, "Majorization tolerance")->capture_default_str();
  add_sidecar(gm);

  auto* lti = app.add_subcommand("lti", "H-infinity norm, phase envelope, Bode CSV and stability certificates");
  lti->add_option("system", c.inputs, "Input .tlj system G")->required()->expected(1);
  lti->add_option("--with", c.with, "Controller system H (.tlj); defaults to H = 0");
  lti->add_option("--certify", c.certify, "Run the small gain or small phase certificate")
      ->check(CLI::IsMember({"gain", "phase"}));
  lti->add_option("--csv", c.csv, "Write Bode data (degrees) here");
  add_grid(lti);
  add_sidecar(lti);

  auto* verify = app.add_subcommand("verify", "Run invariant batteries or the conjecture probe");
  verify->add_option("--suite", c.suite, "default, bcirc, majorization, oracles or conjecture")
      ->check(CLI::IsMember(verify_suites()))
      ->capture_default_str();
  verify->add_option("--seed", c.seed, "Master seed")->capture_default_str();
  verify->add_option("--trials", c.trials, "Trials per check")->capture_default_str();
  verify->add_option("--tol", c.tol, "Majorization tolerance")->capture_default_str();
  verify->add_option("--out-dir", c.out_dir, "Directory for the worst probe pair (conjecture suite)");
  add_sidecar(verify);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  if (!config_path.empty()) {
    try {
      c = config_from_json(json::parse(io::read_text(config_path)));
    } catch (const json::exception& e) {
      err << "error: invalid config JSON: " << e.what() << "\n";
      return kExitUsage;
    } catch (const Error& e) {
      err << "error: " << e.what() << "\n";
      return kExitUsage;
    }
  } else {
    c.command = app.get_subcommands().front()->get_name();
  }
  if (print_config) {
    try {
      out << to_json(c.normalized()).dump(2) << "\n";
      return kExitOk;
    } catch (const Error& e) {
      err << "error: " << e.what() << "\n";
      return kExitUsage;
    }
  }
  return execute(c, out, err);
}

}  // namespace tphase::cli
