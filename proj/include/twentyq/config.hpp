#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "twentyq/harness.hpp"

namespace twentyq {

/// Anything wrong with a config file: missing file, malformed JSON, unknown
/// keys, bad types or values. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Resolution-vs-budget sweep reproducing the Fig. 2 style data via the
/// large-scale simulators (alg1 and sorted_pm, d = 1).
struct BudgetSweepConfig {
  std::vector<double> targets;  ///< target mean query budgets
  double target_eps = 0.1;
  std::uint64_t trials_per_point = 1000;
};

struct AnalysisConfig {
  double tol = 1e-10;
  unsigned dim = 1;
  std::vector<double> eps_grid;
  double eps_max = 0.99;
  std::vector<double> nu_values;  ///< one curve set per nu
};

struct ContinuityConfig {
  double q = 0.5;
  double xi = 0.01;
  double c = 1.0;
};

/// Parsed view of one config document (schema_version 1). Sections are
/// optional; each subcommand demands the ones it needs. Unknown keys anywhere
/// raise ConfigError.
struct ParsedConfig {
  int schema_version = 1;
  std::optional<MdChannel> channel;
  std::optional<Procedure> procedure;
  std::optional<ExperimentConfig> experiment;  ///< assembled when channel present
  std::optional<BudgetSweepConfig> budget_sweep;
  std::optional<AnalysisConfig> analysis;
  std::optional<ContinuityConfig> continuity;
};

ParsedConfig load_config(const std::string& path);
ParsedConfig parse_config_text(const std::string& text);

}  // namespace twentyq
