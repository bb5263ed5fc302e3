#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace tphase::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitAnalysis = 1;
inline constexpr int kExitUsage = 2;

struct GridConfig {
  double lo = 1e-3;
  double hi = 1e3;
  int points = 400;
  bool refine = true;
  friend bool operator==(const GridConfig&, const GridConfig&) = default;
};

/// Everything a single invocation needs. `normalized()` fills command
/// defaults and canonicalises the gauge spelling; `to_json` of a normalized
/// config is its canonical form.
struct RunConfig {
  std::string command;
  std::vector<std::string> inputs;
  std::optional<int> r;
  std::string gauge;  ///< empty: command default
  GridConfig grid;
  std::uint64_t seed = 20240601;
  int trials = 100;
  double tol = 1e-9;
  std::string suite = "default";
  std::string with;     ///< controller system for `lti`
  std::string certify;  ///< "", "gain" or "phase"
  std::string out;
  std::string sidecar;
  std::string csv;
  std::string out_dir;

  [[nodiscard]] RunConfig normalized() const;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

nlohmann::json to_json(const RunConfig& c);
/// Rejects unknown keys and ill-typed values (Error kFormat).
RunConfig config_from_json(const nlohmann::json& j);

/// Suites accepted by `verify`.
const std::vector<std::string>& verify_suites();

/// Runs one command line (without argv[0]). Reports go to `out`, diagnostics
/// to `err`; the return value is the process exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Executes an already-parsed configuration.
int execute(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace tphase::cli
