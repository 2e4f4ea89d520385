#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "twentyq/analysis.hpp"
#include "twentyq/channel.hpp"
#include "twentyq/config.hpp"
#include "twentyq/engine.hpp"
#include "twentyq/harness.hpp"
#include "twentyq/indexing.hpp"
#include "twentyq/infodensity.hpp"
#include "twentyq/large_scale.hpp"
#include "twentyq/sortedpm.hpp"

namespace py = pybind11;
using namespace twentyq;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Noisy adaptive twenty-questions simulation and analysis core";

  py::class_<Rng>(m, "Rng")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def("uniform01", &Rng::uniform01)
      .def("bernoulli", &Rng::bernoulli, py::arg("p"));

  py::class_<LipschitzFn>(m, "LipschitzFn")
      .def_static("affine", &LipschitzFn::affine, py::arg("a"), py::arg("b"))
      .def_static("constant", &LipschitzFn::constant, py::arg("value"))
      .def_readonly("a", &LipschitzFn::a)
      .def_readonly("b", &LipschitzFn::b)
      .def("__call__", &LipschitzFn::operator())
      .def("lipschitz_constant", &LipschitzFn::lipschitz_constant)
      .def("is_constant", &LipschitzFn::is_constant)
      .def("__repr__", &LipschitzFn::describe);

  py::class_<MdChannel>(m, "MdChannel")
      .def_static("bsc", &MdChannel::bsc, py::arg("nu"), py::arg("f"))
      .def_static("tabulated", &MdChannel::tabulated, py::arg("anchor_states"),
                  py::arg("anchor_rows"))
      .def_property_readonly("is_bsc", &MdChannel::is_bsc)
      .def_property_readonly("nu", &MdChannel::nu)
      .def_property_readonly("output_alphabet_size", &MdChannel::output_alphabet_size)
      .def_property_readonly("state_map", &MdChannel::state_map)
      .def("crossover", &MdChannel::crossover, py::arg("state"))
      .def("transition_prob", &MdChannel::transition_prob, py::arg("state"),
           py::arg("x"), py::arg("y"))
      .def("sample_response", &MdChannel::sample_response, py::arg("state"),
           py::arg("x"), py::arg("rng"))
      .def("__repr__", &MdChannel::describe);

  py::class_<ContinuityReport>(m, "ContinuityReport")
      .def_readonly("q", &ContinuityReport::q)
      .def_readonly("xi", &ContinuityReport::xi)
      .def_readonly("lhs", &ContinuityReport::lhs)
      .def_readonly("bound_c", &ContinuityReport::bound_c)
      .def_readonly("satisfied", &ContinuityReport::satisfied);
  m.def("check_continuity", &check_continuity, py::arg("channel"), py::arg("q"),
        py::arg("xi"), py::arg("bound_c"));

  py::class_<Partition>(m, "Partition")
      .def(py::init<std::uint32_t, std::uint32_t>(), py::arg("bins_per_dim"),
           py::arg("dim"))
      .def_property_readonly("bins_per_dim", &Partition::bins_per_dim)
      .def_property_readonly("dim", &Partition::dim)
      .def_property_readonly("total_bins", &Partition::total_bins)
      .def("flatten",
           [](const Partition& p, const std::vector<std::uint32_t>& coords) {
             return p.flatten(BinIndex{coords});
           },
           py::arg("coords"))
      .def("unflatten",
           [](const Partition& p, FlatIndex m) { return p.unflatten(m).coords; },
           py::arg("flat_index"))
      .def("locate",
           [](const Partition& p, const std::vector<double>& s) {
             return p.locate(s).coords;
           },
           py::arg("point"))
      .def("center",
           [](const Partition& p, const std::vector<std::uint32_t>& coords) {
             return p.center(BinIndex{coords});
           },
           py::arg("coords"));

  py::class_<DensityParams>(m, "DensityParams")
      .def(py::init<double, double, const MdChannel&>(), py::arg("p"),
           py::arg("state"), py::arg("channel"), py::keep_alive<1, 4>())
      .def("output_marginal", &DensityParams::output_marginal, py::arg("y"))
      .def("info_density", &DensityParams::info_density, py::arg("x"), py::arg("y"))
      .def("expected_density", &DensityParams::expected_density);

  py::enum_<DecodeRule>(m, "DecodeRule")
      .value("largest_qualifying", DecodeRule::largest_qualifying)
      .value("argmax_density", DecodeRule::argmax_density);

  py::class_<ProcedureConfig>(m, "ProcedureConfig")
      .def(py::init<>())
      .def_readwrite("bins_per_dim", &ProcedureConfig::bins_per_dim)
      .def_readwrite("dim", &ProcedureConfig::dim)
      .def_readwrite("design_q", &ProcedureConfig::design_q)
      .def_readwrite("lambda_", &ProcedureConfig::lambda)
      .def_readwrite("epsilon_term", &ProcedureConfig::epsilon_term)
      .def_readwrite("max_steps", &ProcedureConfig::max_steps)
      .def_readwrite("decode_rule", &ProcedureConfig::decode_rule);

  py::class_<QuerySizeSummary>(m, "QuerySizeSummary")
      .def_readonly("steps", &QuerySizeSummary::steps)
      .def_readonly("mean", &QuerySizeSummary::mean)
      .def_readonly("min", &QuerySizeSummary::min)
      .def_readonly("max", &QuerySizeSummary::max);

  py::class_<TrialRecord>(m, "TrialRecord")
      .def_readonly("tau", &TrialRecord::tau)
      .def_readonly("terminated", &TrialRecord::terminated)
      .def_readonly("capped", &TrialRecord::capped)
      .def_readonly("truth", &TrialRecord::truth)
      .def_readonly("estimate", &TrialRecord::estimate)
      .def_readonly("true_bin", &TrialRecord::true_bin)
      .def_readonly("decoded_bin", &TrialRecord::decoded_bin)
      .def_readonly("decoded_density", &TrialRecord::decoded_density)
      .def_readonly("linf_error", &TrialRecord::linf_error)
      .def_readonly("excess", &TrialRecord::excess)
      .def_readonly("query_sizes", &TrialRecord::query_sizes);

  m.def("run_trial",
        [](const ProcedureConfig& cfg, const MdChannel& ch,
           const std::vector<double>& truth, double delta_eval, Rng& rng) {
          return run_trial(cfg, ch, truth, delta_eval, rng);
        },
        py::arg("config"), py::arg("channel"), py::arg("truth"),
        py::arg("delta_eval"), py::arg("rng"));

  py::class_<StoppingTimePair>(m, "StoppingTimePair")
      .def_readonly("tau1", &StoppingTimePair::tau1)
      .def_readonly("tau2", &StoppingTimePair::tau2)
      .def_readonly("capped1", &StoppingTimePair::capped1)
      .def_readonly("capped2", &StoppingTimePair::capped2);
  m.def("stopping_time_pair", &stopping_time_pair, py::arg("config"),
        py::arg("channel"), py::arg("rng"));
  m.def("choose_lambda", &choose_lambda, py::arg("bins_per_dim"), py::arg("dim"),
        py::arg("target_eps"));

  py::enum_<PmStopRule>(m, "PmStopRule")
      .value("fixed_n", PmStopRule::fixed_n)
      .value("mass_threshold", PmStopRule::mass_threshold);
  m.def("pm_run",
        [](const MdChannel& ch, std::uint32_t n_bins, std::uint64_t n_queries,
           double truth, double delta_eval, Rng& rng, PmStopRule rule,
           double theta, double epsilon_term) {
          return pm_run(ch, n_bins, n_queries, truth, delta_eval, rng, rule,
                        theta, epsilon_term);
        },
        py::arg("channel"), py::arg("n_bins"), py::arg("n_queries"),
        py::arg("truth"), py::arg("delta_eval"), py::arg("rng"),
        py::arg("stop_rule") = PmStopRule::fixed_n, py::arg("theta") = 1.0,
        py::arg("epsilon_term") = 0.0);

  m.def("binary_entropy", &binary_entropy, py::arg("p"));
  m.def("beta", &beta, py::arg("nu"), py::arg("q"), py::arg("f"));
  m.def("sorted_pm_rate", &sorted_pm_rate, py::arg("nu"), py::arg("f"));

  py::class_<CapacityResult>(m, "CapacityResult")
      .def_readonly("value", &CapacityResult::value)
      .def_readonly("argmax_q", &CapacityResult::argmax_q)
      .def_readonly("method", &CapacityResult::method)
      .def_readonly("tolerance", &CapacityResult::tolerance);
  m.def("capacity_bsc", &capacity_bsc, py::arg("nu"), py::arg("f"),
        py::arg("tol") = 1e-10);
  m.def("capacity_general", &capacity_general, py::arg("channel"),
        py::arg("tol") = 1e-10);

  py::enum_<Procedure>(m, "Procedure")
      .value("alg1", Procedure::alg1)
      .value("alg2", Procedure::alg2)
      .value("sorted_pm", Procedure::sorted_pm)
      .value("sorted_pm_terminated", Procedure::sorted_pm_terminated)
      .value("measurement_independent", Procedure::measurement_independent);

  py::class_<RatePoint>(m, "RatePoint")
      .def_readonly("epsilon", &RatePoint::epsilon)
      .def_readonly("rate", &RatePoint::rate);
  py::class_<RateCurve>(m, "RateCurve")
      .def_readonly("procedure", &RateCurve::procedure)
      .def_readonly("channel_summary", &RateCurve::channel_summary)
      .def_readonly("argmax_q", &RateCurve::argmax_q)
      .def_readonly("points", &RateCurve::points);
  m.def("rate_curves",
        [](double nu, const LipschitzFn& f, const std::vector<double>& eps_grid,
           unsigned dim, double eps_max) {
          return rate_curves(nu, f, eps_grid, dim, {}, eps_max);
        },
        py::arg("nu"), py::arg("f"), py::arg("eps_grid"), py::arg("dim") = 1,
        py::arg("eps_max") = 0.99);
  m.def("crossover_epsilon",
        [](double nu, const LipschitzFn& f) -> py::object {
          const auto eps = crossover_epsilon(nu, f);
          return eps ? py::cast(*eps) : py::none();
        },
        py::arg("nu"), py::arg("f"));

  py::enum_<TruthMode>(m, "TruthMode")
      .value("uniform", TruthMode::uniform)
      .value("fixed", TruthMode::fixed);

  py::class_<SortedPmConfig>(m, "SortedPmConfig")
      .def(py::init<>())
      .def_readwrite("bins", &SortedPmConfig::bins)
      .def_readwrite("stop_rule", &SortedPmConfig::stop_rule)
      .def_readwrite("n_queries", &SortedPmConfig::n_queries)
      .def_readwrite("theta", &SortedPmConfig::theta);

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_readwrite("procedure", &ExperimentConfig::procedure)
      .def_readwrite("channel", &ExperimentConfig::channel)
      .def_readwrite("engine", &ExperimentConfig::engine)
      .def_readwrite("pm", &ExperimentConfig::pm)
      .def_readwrite("n_trials", &ExperimentConfig::n_trials)
      .def_readwrite("master_seed", &ExperimentConfig::master_seed)
      .def_readwrite("truth_mode", &ExperimentConfig::truth_mode)
      .def_readwrite("fixed_truth", &ExperimentConfig::fixed_truth)
      .def_readwrite("delta_eval", &ExperimentConfig::delta_eval)
      .def_readwrite("output_path", &ExperimentConfig::output_path)
      .def_readwrite("threads", &ExperimentConfig::threads)
      .def_readwrite("quantile_levels", &ExperimentConfig::quantile_levels);

  py::class_<MeanStderr>(m, "MeanStderr")
      .def_readonly("mean", &MeanStderr::mean)
      .def_readonly("stderr", &MeanStderr::stderr_)
      .def_readonly("n", &MeanStderr::n);

  py::class_<ExperimentSummary>(m, "ExperimentSummary")
      .def_readonly("mean_tau", &ExperimentSummary::mean_tau)
      .def_readonly("excess_prob", &ExperimentSummary::excess_prob)
      .def_readonly("resolution_quantiles", &ExperimentSummary::resolution_quantiles)
      .def_readonly("capped_fraction", &ExperimentSummary::capped_fraction)
      .def_readonly("terminated_fraction", &ExperimentSummary::terminated_fraction)
      .def_readonly("per_trial_csv", &ExperimentSummary::per_trial_csv);

  m.def("run_experiment",
        [](const ExperimentConfig& cfg) { return run_experiment(cfg); },
        py::arg("config"), py::call_guard<py::gil_scoped_release>());

  py::class_<Theorem1Report>(m, "Theorem1Report")
      .def_readonly("applicable", &Theorem1Report::applicable)
      .def_readonly("tau1", &Theorem1Report::tau1)
      .def_readonly("crossing", &Theorem1Report::crossing)
      .def_readonly("error_bound", &Theorem1Report::error_bound)
      .def_readonly("error_bound_stderr", &Theorem1Report::error_bound_stderr)
      .def_readonly("realized_tau", &Theorem1Report::realized_tau)
      .def_readonly("realized_excess", &Theorem1Report::realized_excess)
      .def_readonly("pair_capped_fraction", &Theorem1Report::pair_capped_fraction)
      .def_readonly("trial_capped_fraction", &Theorem1Report::trial_capped_fraction)
      .def_readonly("contaminated", &Theorem1Report::contaminated)
      .def_readonly("l_bound_holds", &Theorem1Report::l_bound_holds)
      .def_readonly("eps_bound_holds", &Theorem1Report::eps_bound_holds)
      .def_readonly("diagnosis", &Theorem1Report::diagnosis);
  m.def("validate_theorem1", &validate_theorem1, py::arg("config"),
        py::arg("n_pairs"), py::arg("cap_tolerance") = 0.01,
        py::call_guard<py::gil_scoped_release>());

  py::class_<BudgetPoint>(m, "BudgetPoint")
      .def_readonly("mean_queries", &BudgetPoint::mean_queries)
      .def_readonly("neg_log_resolution", &BudgetPoint::neg_log_resolution)
      .def_readonly("quantile_level", &BudgetPoint::quantile_level)
      .def_readonly("capped_fraction", &BudgetPoint::capped_fraction)
      .def_readonly("trials", &BudgetPoint::trials);
  m.def("alg1_budget_point", &alg1_budget_point, py::arg("channel"),
        py::arg("design_q"), py::arg("target_queries"), py::arg("target_eps"),
        py::arg("n_trials"), py::arg("seed"),
        py::call_guard<py::gil_scoped_release>());
  m.def("pm_budget_point", &pm_budget_point, py::arg("channel"),
        py::arg("n_queries"), py::arg("target_eps"), py::arg("n_trials"),
        py::arg("seed"), py::call_guard<py::gil_scoped_release>());
  m.def("budget_slope", &budget_slope, py::arg("points"));

  m.attr("__version__") = "0.1.0";
}
