#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "twentyq/config.hpp"
#include "twentyq/csv.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitContaminated = 3;

struct CommonOptions {
  std::string config_path;
  std::string out_path;
  bool bits = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::optional<std::string> procedure;
};

/// CSV goes to --out when given, stdout otherwise.
void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open output file " + out_path);
  }
  out << text;
}

double to_unit(double nats, bool bits) {
  return bits ? nats / std::log(2.0) : nats;
}

const char* rate_column(bool bits) { return bits ? "rate_bits" : "rate_nats"; }

twentyq::ParsedConfig load(const CommonOptions& opts) {
  if (opts.config_path.empty()) {
    throw twentyq::ConfigError("--config is required");
  }
  return twentyq::load_config(opts.config_path);
}

int run_capacity(const CommonOptions& opts) {
  const auto cfg = load(opts);
  if (!cfg.channel) {
    throw twentyq::ConfigError("capacity: config needs a channel section");
  }
  const double tol = cfg.analysis ? cfg.analysis->tol : 1e-10;
  std::ostringstream csv;
  csv << "quantity,value,unit,argmax_q,tolerance\n";
  const char* unit = opts.bits ? "bits" : "nats";
  const auto general = twentyq::capacity_general(*cfg.channel, tol);
  if (cfg.channel->is_bsc()) {
    const auto closed =
        twentyq::capacity_bsc(cfg.channel->nu(), cfg.channel->state_map(), tol);
    csv << "capacity_bsc," << twentyq::format_double(to_unit(closed.value, opts.bits))
        << ',' << unit << ',' << twentyq::format_double(closed.argmax_q) << ','
        << twentyq::format_double(tol) << '\n';
  }
  csv << "capacity_general," << twentyq::format_double(to_unit(general.value, opts.bits))
      << ',' << unit << ',' << twentyq::format_double(general.argmax_q) << ','
      << twentyq::format_double(tol) << '\n';
  if (cfg.channel->is_bsc()) {
    const double pm =
        twentyq::sorted_pm_rate(cfg.channel->nu(), cfg.channel->state_map());
    csv << "sorted_pm_rate," << twentyq::format_double(to_unit(pm, opts.bits)) << ','
        << unit << ",," << twentyq::format_double(tol) << '\n';
  }
  emit(opts.out_path, csv.str());
  return kExitOk;
}

int run_rate_curves(const CommonOptions& opts) {
  const auto cfg = load(opts);
  if (!cfg.channel || !cfg.channel->is_bsc()) {
    throw twentyq::ConfigError("rate-curves: config needs an mdBSC channel");
  }
  if (!cfg.analysis || cfg.analysis->eps_grid.empty()) {
    throw twentyq::ConfigError("rate-curves: config needs analysis.eps_grid");
  }
  const auto& analysis = *cfg.analysis;
  std::vector<double> nus = analysis.nu_values;
  if (nus.empty()) nus.push_back(cfg.channel->nu());
  const twentyq::LipschitzFn f = cfg.channel->state_map();

  std::ostringstream csv;
  csv << "procedure,nu," << "epsilon," << rate_column(opts.bits) << ",argmax_q\n";
  for (double nu : nus) {
    const auto curves = twentyq::rate_curves(nu, f, analysis.eps_grid,
                                             analysis.dim, {}, analysis.eps_max);
    for (const auto& curve : curves) {
      for (const auto& pt : curve.points) {
        csv << twentyq::procedure_name(curve.procedure) << ','
            << twentyq::format_double(nu) << ',' << twentyq::format_double(pt.epsilon)
            << ',' << twentyq::format_double(to_unit(pt.rate, opts.bits)) << ',';
        if (curve.procedure == twentyq::Procedure::alg2 ||
            curve.procedure == twentyq::Procedure::measurement_independent) {
          csv << twentyq::format_double(curve.argmax_q);
        }
        csv << '\n';
      }
    }
  }
  emit(opts.out_path, csv.str());
  return kExitOk;
}

void apply_overrides(const CommonOptions& opts, twentyq::ExperimentConfig& cfg) {
  if (opts.seed) cfg.master_seed = *opts.seed;
  if (opts.trials) cfg.n_trials = *opts.trials;
  if (opts.procedure) cfg.procedure = twentyq::procedure_from_name(*opts.procedure);
  if (!opts.out_path.empty()) cfg.output_path = opts.out_path;
}

int run_simulate(const CommonOptions& opts) {
  auto cfg = load(opts);
  if (!cfg.experiment) {
    throw twentyq::ConfigError("simulate: config needs channel/experiment sections");
  }
  twentyq::ExperimentConfig exp = *cfg.experiment;
  apply_overrides(opts, exp);

  if (cfg.budget_sweep) {
    // Fig. 2 style table through the large-scale simulators
    const auto& sweep = *cfg.budget_sweep;
    if (exp.procedure != twentyq::Procedure::alg1 &&
        exp.procedure != twentyq::Procedure::sorted_pm) {
      throw twentyq::ConfigError("budget_sweep: supported procedures are alg1 and sorted_pm");
    }
    std::ostringstream csv;
    csv << "procedure,target_budget,mean_queries,neg_log_resolution,"
           "quantile_level,capped_fraction,trials\n";
    for (double target : sweep.targets) {
      twentyq::BudgetPoint pt;
      if (exp.procedure == twentyq::Procedure::alg1) {
        pt = twentyq::alg1_budget_point(exp.channel, exp.engine.design_q, target,
                                        sweep.target_eps, sweep.trials_per_point,
                                        exp.master_seed);
      } else {
        pt = twentyq::pm_budget_point(exp.channel,
                                      static_cast<std::uint64_t>(std::llround(target)),
                                      sweep.target_eps, sweep.trials_per_point,
                                      exp.master_seed);
      }
      csv << twentyq::procedure_name(exp.procedure) << ','
          << twentyq::format_double(target) << ','
          << twentyq::format_double(pt.mean_queries) << ','
          << twentyq::format_double(pt.neg_log_resolution) << ','
          << twentyq::format_double(pt.quantile_level) << ','
          << twentyq::format_double(pt.capped_fraction) << ','
          << twentyq::format_u64(pt.trials) << '\n';
    }
    emit(opts.out_path, csv.str());
    return kExitOk;
  }

  // single experiment: per-trial CSV to output_path (--out), summary to stdout
  const auto summary = twentyq::run_experiment(exp);
  std::ostringstream out;
  out << "metric,value,stderr\n";
  out << "mean_tau," << twentyq::format_double(summary.mean_tau.mean) << ','
      << twentyq::format_double(summary.mean_tau.stderr_) << '\n';
  out << "excess_prob," << twentyq::format_double(summary.excess_prob.mean) << ','
      << twentyq::format_double(summary.excess_prob.stderr_) << '\n';
  out << "capped_fraction," << twentyq::format_double(summary.capped_fraction) << ",\n";
  out << "terminated_fraction," << twentyq::format_double(summary.terminated_fraction)
      << ",\n";
  for (const auto& [level, value] : summary.resolution_quantiles) {
    out << "resolution_q" << twentyq::format_double(level) << ','
        << twentyq::format_double(value) << ",\n";
  }
  std::cout << out.str();
  return kExitOk;
}

int run_validate_t1(const CommonOptions& opts, std::uint64_t pairs) {
  auto cfg = load(opts);
  if (!cfg.experiment) {
    throw twentyq::ConfigError("validate-t1: config needs channel/experiment sections");
  }
  twentyq::ExperimentConfig exp = *cfg.experiment;
  apply_overrides(opts, exp);
  if (pairs == 0) pairs = exp.n_trials;

  const auto report = twentyq::validate_theorem1(exp, pairs);
  std::ostringstream out;
  out << "metric,value,stderr\n";
  out << "tau1_mean," << twentyq::format_double(report.tau1.mean) << ','
      << twentyq::format_double(report.tau1.stderr_) << '\n';
  out << "crossing_prob," << twentyq::format_double(report.crossing.mean) << ','
      << twentyq::format_double(report.crossing.stderr_) << '\n';
  out << "error_bound," << twentyq::format_double(report.error_bound) << ','
      << twentyq::format_double(report.error_bound_stderr) << '\n';
  out << "realized_mean_tau," << twentyq::format_double(report.realized_tau.mean) << ','
      << twentyq::format_double(report.realized_tau.stderr_) << '\n';
  out << "realized_excess," << twentyq::format_double(report.realized_excess.mean) << ','
      << twentyq::format_double(report.realized_excess.stderr_) << '\n';
  out << "pair_capped_fraction," << twentyq::format_double(report.pair_capped_fraction)
      << ",\n";
  out << "trial_capped_fraction," << twentyq::format_double(report.trial_capped_fraction)
      << ",\n";
  out << "applicable," << (report.applicable ? 1 : 0) << ",\n";
  if (report.applicable) {
    out << "l_bound_holds," << (report.l_bound_holds ? 1 : 0) << ",\n";
    out << "eps_bound_holds," << (report.eps_bound_holds ? 1 : 0) << ",\n";
  }
  emit(opts.out_path, out.str());
  if (report.contaminated) {
    std::cerr << "validate-t1: " << report.diagnosis << "\n";
    return kExitContaminated;
  }
  return kExitOk;
}

int run_check_continuity(const CommonOptions& opts) {
  const auto cfg = load(opts);
  if (!cfg.channel) {
    throw twentyq::ConfigError("check-continuity: config needs a channel section");
  }
  if (!cfg.continuity) {
    throw twentyq::ConfigError("check-continuity: config needs a continuity section");
  }
  const auto& c = *cfg.continuity;
  const auto report = twentyq::check_continuity(*cfg.channel, c.q, c.xi, c.c);
  std::ostringstream csv;
  csv << "q,xi,lhs,bound_c,satisfied\n";
  csv << twentyq::format_double(report.q) << ',' << twentyq::format_double(report.xi)
      << ',' << twentyq::format_double(report.lhs) << ','
      << twentyq::format_double(report.bound_c) << ',' << (report.satisfied ? 1 : 0)
      << '\n';
  emit(opts.out_path, csv.str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Noisy adaptive twenty-questions simulator and analysis toolkit"};
  app.require_subcommand(1);

  CommonOptions opts;
  std::uint64_t pairs = 0;
  std::uint64_t seed_val = 0;
  std::uint64_t trials_val = 0;
  std::string procedure_val;
  std::vector<CLI::Option*> seed_opts, trials_opts, procedure_opts;

  auto add_common = [&](CLI::App* sub, bool with_bits, bool with_sim_flags) {
    sub->add_option("--config", opts.config_path, "JSON config file")->required();
    sub->add_option("--out", opts.out_path, "output CSV path (default: stdout)");
    if (with_bits) {
      sub->add_flag("--bits", opts.bits, "report rates in bits instead of nats");
    }
    if (with_sim_flags) {
      seed_opts.push_back(
          sub->add_option("--seed", seed_val, "override experiment.master_seed"));
      trials_opts.push_back(
          sub->add_option("--trials", trials_val, "override experiment.n_trials"));
      procedure_opts.push_back(
          sub->add_option("--procedure", procedure_val, "override the procedure"));
    }
  };

  auto* capacity = app.add_subcommand("capacity", "closed-form and enumerated capacities");
  add_common(capacity, true, false);
  auto* curves = app.add_subcommand("rate-curves", "asymptotic resolution-decay rate curves");
  add_common(curves, true, false);
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo trials or budget sweeps");
  add_common(simulate, false, true);
  auto* validate = app.add_subcommand("validate-t1", "check the non-asymptotic bounds empirically");
  add_common(validate, false, true);
  validate->add_option("--pairs", pairs, "stopping-time pair samples (default: n_trials)");
  auto* continuity = app.add_subcommand("check-continuity", "channel continuity report");
  add_common(continuity, false, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // unknown flags and malformed invocations are config errors (exit 2)
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  for (const auto* o : seed_opts) {
    if (o->count() > 0) opts.seed = seed_val;
  }
  for (const auto* o : trials_opts) {
    if (o->count() > 0) opts.trials = trials_val;
  }
  for (const auto* o : procedure_opts) {
    if (o->count() > 0) opts.procedure = procedure_val;
  }

  try {
    if (capacity->parsed()) return run_capacity(opts);
    if (curves->parsed()) return run_rate_curves(opts);
    if (simulate->parsed()) return run_simulate(opts);
    if (validate->parsed()) return run_validate_t1(opts, pairs);
    if (continuity->parsed()) return run_check_continuity(opts);
  } catch (const twentyq::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
