#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "twentyq/analysis.hpp"
#include "twentyq/channel.hpp"
#include "twentyq/engine.hpp"
#include "twentyq/sortedpm.hpp"
#include "twentyq/stats.hpp"

namespace twentyq {

enum class TruthMode { uniform, fixed };

struct SortedPmConfig {
  std::uint32_t bins = 1024;
  PmStopRule stop_rule = PmStopRule::fixed_n;
  std::uint64_t n_queries = 30;
  double theta = 0.99;
};

struct ExperimentConfig {
  Procedure procedure = Procedure::alg1;
  MdChannel channel = MdChannel::bsc(0.5, LipschitzFn::affine(0.1, 0.3));
  ProcedureConfig engine;
  SortedPmConfig pm;
  std::uint64_t n_trials = 1000;
  std::uint64_t master_seed = 1;
  TruthMode truth_mode = TruthMode::uniform;
  std::vector<double> fixed_truth;
  double delta_eval = 0.0625;
  std::string output_path;  ///< per-trial CSV; empty writes nothing
  unsigned threads = 1;     ///< 0 picks the hardware count
  std::vector<double> quantile_levels = {0.5, 0.9, 0.95, 0.99};

  void validate() const;
};

struct ExperimentSummary {
  MeanStderr mean_tau;
  MeanStderr excess_prob;  ///< capped trials count as excess (conservative)
  std::vector<std::pair<double, double>> resolution_quantiles;  ///< (level, value)
  double capped_fraction = 0.0;
  double terminated_fraction = 0.0;
  std::string per_trial_csv;  ///< path actually written, empty if none
};

/// Run n_trials independent trials, trial i seeded with master_seed + i, so
/// results are identical for any worker count. Writes the per-trial CSV when
/// output_path is set. Also returns the records for callers that post-process.
ExperimentSummary run_experiment(const ExperimentConfig& cfg,
                                 std::vector<TrialRecord>* records = nullptr);

/// "Resolution at excess probability eps": the (1-eps) empirical quantile of
/// the per-trial L-inf errors (capped trials count at resolution 1).
double resolution_at_excess(const std::vector<TrialRecord>& records, double eps);

struct Theorem1Report {
  bool applicable = true;  ///< false when the decoder deviates from the literal rule
  MeanStderr tau1;         ///< estimate of E[tau_1] (the l bound)
  MeanStderr crossing;     ///< estimate of Pr{tau_1 >= tau_2}
  double error_bound = 0.0;         ///< (M^d - 1) * crossing.mean
  double error_bound_stderr = 0.0;  ///< (M^d - 1) * crossing.stderr
  MeanStderr realized_tau;
  MeanStderr realized_excess;
  double pair_capped_fraction = 0.0;
  double trial_capped_fraction = 0.0;
  bool contaminated = false;  ///< capped fraction above the tolerance
  bool l_bound_holds = false;
  bool eps_bound_holds = false;
  std::string diagnosis;
};

/// Monte Carlo check of the two Theorem-1 bounds: realized mean stopping time
/// against E[tau_1], and realized excess probability against
/// (M^d - 1) Pr{tau_1 >= tau_2}, both with 3-standard-error slack. The pair
/// statistics are estimated from n_pairs stopping_time_pair draws seeded from
/// master_seed; realized statistics reuse run_experiment. Pair samples where
/// both times are capped count toward the crossing event (conservative) and
/// a capped fraction above cap_tolerance marks the report contaminated.
Theorem1Report validate_theorem1(const ExperimentConfig& cfg,
                                 std::uint64_t n_pairs,
                                 double cap_tolerance = 0.01);

/// One point of a resolution-vs-budget experiment: the mean realized number
/// of queries against -log of the resolution quantile at quantile_level.
struct BudgetPoint {
  double mean_queries = 0.0;
  double neg_log_resolution = 0.0;
  double quantile_level = 0.0;
  double capped_fraction = 0.0;
  std::uint64_t trials = 0;
};

/// Large-scale Algorithm-1 point (d = 1): bins chosen so that the union-bound
/// threshold lambda = log((M-1)/target_eps) lands the budget near
/// target_queries; resolution read at the (1 - target_eps) quantile.
BudgetPoint alg1_budget_point(const MdChannel& ch, double design_q,
                              double target_queries, double target_eps,
                              std::uint64_t n_trials, std::uint64_t seed);

/// Continuum sorted-PM point at a fixed query budget, same quantile framing.
BudgetPoint pm_budget_point(const MdChannel& ch, std::uint64_t n_queries,
                            double target_eps, std::uint64_t n_trials,
                            std::uint64_t seed);

/// Least-squares slope of neg_log_resolution against mean_queries.
double budget_slope(const std::vector<BudgetPoint>& points);

}  // namespace twentyq
