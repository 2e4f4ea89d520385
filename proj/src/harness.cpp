#include "twentyq/harness.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "twentyq/csv.hpp"
#include "twentyq/infodensity.hpp"
#include "twentyq/large_scale.hpp"

namespace twentyq {

void ExperimentConfig::validate() const {
  if (n_trials < 1) {
    throw std::invalid_argument("ExperimentConfig: n_trials must be >= 1");
  }
  if (!(delta_eval > 0.0 && delta_eval < 1.0)) {
    throw std::invalid_argument("ExperimentConfig: delta_eval must lie in (0,1)");
  }
  const unsigned dim =
      (procedure == Procedure::sorted_pm || procedure == Procedure::sorted_pm_terminated)
          ? 1
          : engine.dim;
  if (truth_mode == TruthMode::fixed) {
    if (fixed_truth.size() != dim) {
      throw std::invalid_argument("ExperimentConfig: fixed truth has wrong dimension");
    }
    for (double s : fixed_truth) {
      if (!(s >= 0.0 && s <= 1.0)) {
        throw std::invalid_argument("ExperimentConfig: fixed truth outside the unit cube");
      }
    }
  }
  switch (procedure) {
    case Procedure::alg1:
    case Procedure::alg2:
      engine.validate(channel);
      break;
    case Procedure::sorted_pm:
    case Procedure::sorted_pm_terminated:
      if (pm.bins < 1) {
        throw std::invalid_argument("ExperimentConfig: sorted PM needs >= 1 bin");
      }
      if (channel.output_alphabet_size() != 2) {
        throw std::invalid_argument("ExperimentConfig: sorted PM needs a binary-output channel");
      }
      break;
    case Procedure::measurement_independent:
      throw std::invalid_argument(
          "ExperimentConfig: measurement_independent is an analysis curve, not a "
          "simulable procedure");
  }
}

namespace {

TrialRecord one_trial(const ExperimentConfig& cfg, std::uint64_t index) {
  Rng rng(cfg.master_seed + index);
  const unsigned dim =
      (cfg.procedure == Procedure::sorted_pm ||
       cfg.procedure == Procedure::sorted_pm_terminated)
          ? 1
          : cfg.engine.dim;
  std::vector<double> truth(dim);
  if (cfg.truth_mode == TruthMode::uniform) {
    for (double& s : truth) s = rng.uniform01();
  } else {
    truth = cfg.fixed_truth;
  }
  switch (cfg.procedure) {
    case Procedure::alg1: {
      ProcedureConfig pc = cfg.engine;
      pc.epsilon_term = 0.0;
      return run_trial(pc, cfg.channel, truth, cfg.delta_eval, rng);
    }
    case Procedure::alg2:
      return run_trial(cfg.engine, cfg.channel, truth, cfg.delta_eval, rng);
    case Procedure::sorted_pm:
      return pm_run(cfg.channel, cfg.pm.bins, cfg.pm.n_queries, truth[0],
                    cfg.delta_eval, rng, cfg.pm.stop_rule, cfg.pm.theta, 0.0);
    case Procedure::sorted_pm_terminated:
      return pm_run(cfg.channel, cfg.pm.bins, cfg.pm.n_queries, truth[0],
                    cfg.delta_eval, rng, cfg.pm.stop_rule, cfg.pm.theta,
                    cfg.engine.epsilon_term);
    case Procedure::measurement_independent:
      break;
  }
  throw std::logic_error("one_trial: unreachable");
}

void write_per_trial_csv(const ExperimentConfig& cfg,
                         const std::vector<TrialRecord>& records) {
  std::ofstream out(cfg.output_path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("run_experiment: cannot open output file " +
                             cfg.output_path);
  }
  out << "trial,tau,terminated,capped,true_bin,decoded_bin,linf_error,excess,"
         "mean_query_size\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const TrialRecord& r = records[i];
    out << format_u64(i) << ',' << format_u64(r.tau) << ','
        << (r.terminated ? 1 : 0) << ',' << (r.capped ? 1 : 0) << ','
        << format_u64(r.true_bin) << ',' << format_u64(r.decoded_bin) << ','
        << format_double(r.linf_error) << ',' << (r.excess ? 1 : 0) << ','
        << format_double(r.query_sizes.steps > 0 ? r.query_sizes.mean : 0.0)
        << '\n';
  }
}

}  // namespace

ExperimentSummary run_experiment(const ExperimentConfig& cfg,
                                 std::vector<TrialRecord>* records_out) {
  cfg.validate();
  std::vector<TrialRecord> records(cfg.n_trials);

  unsigned threads = cfg.threads == 0 ? std::thread::hardware_concurrency() : cfg.threads;
  if (threads < 1) threads = 1;
  if (threads > cfg.n_trials) threads = static_cast<unsigned>(cfg.n_trials);

  if (threads == 1) {
    for (std::uint64_t i = 0; i < cfg.n_trials; ++i) {
      records[i] = one_trial(cfg, i);
    }
  } else {
    // per-trial seeding makes the result independent of the worker schedule
    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (std::uint64_t i = next.fetch_add(1); i < cfg.n_trials;
             i = next.fetch_add(1)) {
          records[i] = one_trial(cfg, i);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  ExperimentSummary summary;
  std::vector<double> taus(cfg.n_trials), excesses(cfg.n_trials);
  std::vector<double> resolutions(cfg.n_trials);
  std::uint64_t capped = 0, terminated = 0;
  for (std::uint64_t i = 0; i < cfg.n_trials; ++i) {
    const TrialRecord& r = records[i];
    taus[i] = static_cast<double>(r.tau);
    excesses[i] = (r.excess || r.capped) ? 1.0 : 0.0;  // conservative
    resolutions[i] = r.capped ? 1.0 : r.linf_error;
    if (r.capped) ++capped;
    if (r.terminated) ++terminated;
  }
  summary.mean_tau = mean_stderr(taus);
  summary.excess_prob = mean_stderr(excesses);
  summary.capped_fraction =
      static_cast<double>(capped) / static_cast<double>(cfg.n_trials);
  summary.terminated_fraction =
      static_cast<double>(terminated) / static_cast<double>(cfg.n_trials);
  for (double level : cfg.quantile_levels) {
    summary.resolution_quantiles.emplace_back(level, quantile(resolutions, level));
  }
  if (!cfg.output_path.empty()) {
    write_per_trial_csv(cfg, records);
    summary.per_trial_csv = cfg.output_path;
  }
  if (records_out) *records_out = std::move(records);
  return summary;
}

double resolution_at_excess(const std::vector<TrialRecord>& records, double eps) {
  std::vector<double> resolutions;
  resolutions.reserve(records.size());
  for (const TrialRecord& r : records) {
    resolutions.push_back(r.capped ? 1.0 : r.linf_error);
  }
  return quantile(std::move(resolutions), 1.0 - eps);
}

Theorem1Report validate_theorem1(const ExperimentConfig& cfg,
                                 std::uint64_t n_pairs, double cap_tolerance) {
  cfg.validate();
  if (cfg.procedure != Procedure::alg1 && cfg.procedure != Procedure::alg2) {
    throw std::invalid_argument("validate_theorem1: needs alg1 or alg2");
  }
  if (n_pairs < 2) {
    throw std::invalid_argument("validate_theorem1: need at least two pairs");
  }
  Theorem1Report report;
  report.applicable = cfg.engine.decode_rule == DecodeRule::largest_qualifying &&
                      cfg.engine.epsilon_term == 0.0;

  const Partition partition(cfg.engine.bins_per_dim, cfg.engine.dim);
  const double other_bins = static_cast<double>(partition.total_bins() - 1);

  std::vector<double> tau1s(n_pairs), crossings(n_pairs);
  std::uint64_t pair_capped = 0;
  for (std::uint64_t i = 0; i < n_pairs; ++i) {
    Rng rng(cfg.master_seed + 0x9e3779b97f4a7c15ULL + i);  // distinct stream
    const StoppingTimePair pair = stopping_time_pair(cfg.engine, cfg.channel, rng);
    tau1s[i] = static_cast<double>(pair.tau1);
    crossings[i] = pair.tau1 >= pair.tau2 ? 1.0 : 0.0;
    if (pair.capped1 || (pair.capped2 && pair.tau1 >= pair.tau2)) ++pair_capped;
  }
  report.tau1 = mean_stderr(tau1s);
  report.crossing = mean_stderr(crossings);
  report.error_bound = other_bins * report.crossing.mean;
  report.error_bound_stderr = other_bins * report.crossing.stderr_;
  report.pair_capped_fraction =
      static_cast<double>(pair_capped) / static_cast<double>(n_pairs);

  ExperimentConfig run_cfg = cfg;
  run_cfg.output_path.clear();
  const ExperimentSummary summary = run_experiment(run_cfg);
  report.realized_tau = summary.mean_tau;
  report.realized_excess = summary.excess_prob;
  report.trial_capped_fraction = summary.capped_fraction;

  report.contaminated = report.pair_capped_fraction > cap_tolerance ||
                        report.trial_capped_fraction > cap_tolerance;
  if (report.contaminated) {
    std::ostringstream os;
    os << "cap contamination: pair_capped=" << report.pair_capped_fraction
       << " trial_capped=" << report.trial_capped_fraction
       << " exceeds tolerance " << cap_tolerance
       << "; raise max_steps before trusting the bounds";
    report.diagnosis = os.str();
  }
  report.l_bound_holds = report.realized_tau.mean <=
                         report.tau1.mean + 3.0 * std::hypot(report.tau1.stderr_,
                                                             report.realized_tau.stderr_);
  report.eps_bound_holds =
      report.realized_excess.mean <=
      report.error_bound + 3.0 * std::hypot(report.error_bound_stderr,
                                            report.realized_excess.stderr_);
  return report;
}

BudgetPoint alg1_budget_point(const MdChannel& ch, double design_q,
                              double target_queries, double target_eps,
                              std::uint64_t n_trials, std::uint64_t seed) {
  if (!(target_queries > 0.0) || !(target_eps > 0.0 && target_eps < 1.0)) {
    throw std::invalid_argument("alg1_budget_point: bad targets");
  }
  const DensityParams params(design_q, design_q, ch);
  const double per_step = params.expected_density();
  if (!(per_step > 0.0)) {
    throw std::invalid_argument("alg1_budget_point: channel carries no information");
  }
  // lambda ~ C * target so the mean stopping time lands near the target;
  // the regression downstream uses the measured budget, not the target
  const double lambda = per_step * target_queries;
  const double num_bins = 1.0 + target_eps * std::exp(lambda);
  const auto max_steps =
      static_cast<std::uint64_t>(std::ceil(4.0 * target_queries)) + 64;
  const LargeMAlg1Sim sim(ch, num_bins, design_q, lambda, max_steps);

  std::vector<double> taus(n_trials), log_res(n_trials);
  std::uint64_t capped = 0;
  for (std::uint64_t i = 0; i < n_trials; ++i) {
    Rng rng(seed + i);
    const ScaledTrial t = sim.run_trial(rng);
    taus[i] = static_cast<double>(t.tau);
    log_res[i] = t.capped ? 0.0 : t.log_resolution;
    if (t.capped) ++capped;
  }
  BudgetPoint pt;
  pt.quantile_level = 1.0 - target_eps;
  pt.mean_queries = mean_stderr(taus).mean;
  pt.neg_log_resolution = -quantile(std::move(log_res), pt.quantile_level);
  pt.capped_fraction = static_cast<double>(capped) / static_cast<double>(n_trials);
  pt.trials = n_trials;
  return pt;
}

BudgetPoint pm_budget_point(const MdChannel& ch, std::uint64_t n_queries,
                            double target_eps, std::uint64_t n_trials,
                            std::uint64_t seed) {
  const ContinuumPmSim sim(ch);
  std::vector<double> log_res(n_trials);
  for (std::uint64_t i = 0; i < n_trials; ++i) {
    Rng rng(seed + i);
    log_res[i] = sim.run(n_queries, rng).log_resolution;
  }
  BudgetPoint pt;
  pt.quantile_level = 1.0 - target_eps;
  pt.mean_queries = static_cast<double>(n_queries);
  pt.neg_log_resolution = -quantile(std::move(log_res), pt.quantile_level);
  pt.trials = n_trials;
  return pt;
}

double budget_slope(const std::vector<BudgetPoint>& points) {
  std::vector<double> x, y;
  for (const BudgetPoint& p : points) {
    x.push_back(p.mean_queries);
    y.push_back(p.neg_log_resolution);
  }
  return fit_slope(x, y);
}

}  // namespace twentyq
