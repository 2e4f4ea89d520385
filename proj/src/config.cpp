#include "twentyq/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "twentyq/analysis.hpp"
#include "twentyq/engine.hpp"

namespace twentyq {

namespace {

using nlohmann::json;

/// Unknown keys are hard errors: silently ignored settings corrupt studies.
void require_keys(const json& obj, const std::string& context,
                  const std::set<std::string>& allowed) {
  if (!obj.is_object()) {
    throw ConfigError(context + ": expected an object");
  }
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) {
      throw ConfigError(context + ": unknown key '" + item.key() + "'");
    }
  }
}

double get_number(const json& obj, const std::string& context, const char* key) {
  if (!obj.contains(key)) throw ConfigError(context + ": missing key '" + key + "'");
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(context + "." + key + ": expected a number");
  return v.get<double>();
}

double get_number_or(const json& obj, const std::string& context, const char* key,
                     double fallback) {
  return obj.contains(key) ? get_number(obj, context, key) : fallback;
}

std::uint64_t get_uint(const json& obj, const std::string& context, const char* key,
                       std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_unsigned()) {
    throw ConfigError(context + "." + key + ": expected a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

std::string get_string(const json& obj, const std::string& context, const char* key) {
  if (!obj.contains(key)) throw ConfigError(context + ": missing key '" + key + "'");
  const json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(context + "." + key + ": expected a string");
  return v.get<std::string>();
}

std::vector<double> get_number_array(const json& v, const std::string& context) {
  if (!v.is_array()) throw ConfigError(context + ": expected an array of numbers");
  std::vector<double> out;
  for (const json& x : v) {
    if (!x.is_number()) throw ConfigError(context + ": expected numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

MdChannel parse_channel(const json& obj) {
  require_keys(obj, "channel", {"family", "nu", "f", "anchors"});
  const std::string family = get_string(obj, "channel", "family");
  if (family == "mdBSC") {
    if (!obj.contains("f")) throw ConfigError("channel: mdBSC needs the 'f' map");
    const json& f = obj.at("f");
    require_keys(f, "channel.f", {"a", "b"});
    const LipschitzFn fn = LipschitzFn::affine(get_number(f, "channel.f", "a"),
                                               get_number_or(f, "channel.f", "b", 0.0));
    try {
      return MdChannel::bsc(get_number(obj, "channel", "nu"), fn);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("channel: ") + e.what());
    }
  }
  if (family == "tabulated") {
    if (!obj.contains("anchors")) {
      throw ConfigError("channel: tabulated needs 'anchors'");
    }
    const json& anchors = obj.at("anchors");
    if (!anchors.is_array() || anchors.size() < 2) {
      throw ConfigError("channel.anchors: expected an array of >= 2 anchors");
    }
    std::vector<double> states;
    std::vector<std::vector<std::vector<double>>> rows;
    for (std::size_t i = 0; i < anchors.size(); ++i) {
      const std::string ctx = "channel.anchors[" + std::to_string(i) + "]";
      const json& a = anchors[i];
      require_keys(a, ctx, {"state", "rows"});
      states.push_back(get_number(a, ctx, "state"));
      const json& r = a.at("rows");
      if (!r.is_array() || r.size() != 2) {
        throw ConfigError(ctx + ".rows: expected two rows (binary input)");
      }
      rows.push_back({get_number_array(r[0], ctx + ".rows[0]"),
                      get_number_array(r[1], ctx + ".rows[1]")});
    }
    try {
      return MdChannel::tabulated(std::move(states), std::move(rows));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("channel: ") + e.what());
    }
  }
  throw ConfigError("channel.family: expected 'mdBSC' or 'tabulated'");
}

ProcedureConfig parse_engine(const json& obj, const MdChannel& channel) {
  require_keys(obj, "engine",
               {"bins_per_dim", "dim", "design_q", "lambda", "epsilon_term",
                "max_steps", "decode_rule"});
  ProcedureConfig pc;
  pc.bins_per_dim = static_cast<std::uint32_t>(get_uint(obj, "engine", "bins_per_dim", 2));
  pc.dim = static_cast<std::uint32_t>(get_uint(obj, "engine", "dim", 1));

  if (obj.contains("design_q")) {
    const json& q = obj.at("design_q");
    if (q.is_string()) {
      if (q.get<std::string>() != "capacity-argmax") {
        throw ConfigError("engine.design_q: expected a number or 'capacity-argmax'");
      }
      pc.design_q = capacity_general(channel).argmax_q;
    } else if (q.is_number()) {
      pc.design_q = q.get<double>();
    } else {
      throw ConfigError("engine.design_q: expected a number or 'capacity-argmax'");
    }
  }
  if (obj.contains("lambda")) {
    const json& l = obj.at("lambda");
    if (l.is_object()) {
      require_keys(l, "engine.lambda", {"target_eps"});
      pc.lambda = choose_lambda(pc.bins_per_dim, pc.dim,
                                get_number(l, "engine.lambda", "target_eps"));
    } else if (l.is_number()) {
      pc.lambda = l.get<double>();
    } else {
      throw ConfigError("engine.lambda: expected a number or {\"target_eps\": ...}");
    }
  }
  pc.epsilon_term = get_number_or(obj, "engine", "epsilon_term", 0.0);
  pc.max_steps = get_uint(obj, "engine", "max_steps", 0);
  if (obj.contains("decode_rule")) {
    const std::string rule = get_string(obj, "engine", "decode_rule");
    if (rule == "largest-qualifying") {
      pc.decode_rule = DecodeRule::largest_qualifying;
    } else if (rule == "argmax-density") {
      pc.decode_rule = DecodeRule::argmax_density;
    } else {
      throw ConfigError("engine.decode_rule: expected 'largest-qualifying' or 'argmax-density'");
    }
  }
  return pc;
}

SortedPmConfig parse_pm(const json& obj) {
  require_keys(obj, "sorted_pm", {"bins", "stop"});
  SortedPmConfig pm;
  pm.bins = static_cast<std::uint32_t>(get_uint(obj, "sorted_pm", "bins", 1024));
  if (obj.contains("stop")) {
    const json& s = obj.at("stop");
    require_keys(s, "sorted_pm.stop", {"rule", "n", "theta", "max_queries"});
    const std::string rule = get_string(s, "sorted_pm.stop", "rule");
    if (rule == "fixed-n") {
      pm.stop_rule = PmStopRule::fixed_n;
      pm.n_queries = get_uint(s, "sorted_pm.stop", "n", 30);
    } else if (rule == "mass-threshold") {
      pm.stop_rule = PmStopRule::mass_threshold;
      pm.theta = get_number(s, "sorted_pm.stop", "theta");
      pm.n_queries = get_uint(s, "sorted_pm.stop", "max_queries", 100000);
    } else {
      throw ConfigError("sorted_pm.stop.rule: expected 'fixed-n' or 'mass-threshold'");
    }
  }
  return pm;
}

void parse_experiment(const json& obj, ExperimentConfig& cfg) {
  require_keys(obj, "experiment",
               {"n_trials", "master_seed", "threads", "truth", "delta_eval",
                "output_path", "quantile_levels"});
  cfg.n_trials = get_uint(obj, "experiment", "n_trials", cfg.n_trials);
  cfg.master_seed = get_uint(obj, "experiment", "master_seed", cfg.master_seed);
  cfg.threads = static_cast<unsigned>(get_uint(obj, "experiment", "threads", cfg.threads));
  cfg.delta_eval = get_number_or(obj, "experiment", "delta_eval", cfg.delta_eval);
  if (obj.contains("output_path")) {
    cfg.output_path = get_string(obj, "experiment", "output_path");
  }
  if (obj.contains("truth")) {
    const json& t = obj.at("truth");
    require_keys(t, "experiment.truth", {"mode", "point"});
    const std::string mode = get_string(t, "experiment.truth", "mode");
    if (mode == "uniform") {
      cfg.truth_mode = TruthMode::uniform;
    } else if (mode == "fixed") {
      cfg.truth_mode = TruthMode::fixed;
      if (!t.contains("point")) {
        throw ConfigError("experiment.truth: fixed mode needs 'point'");
      }
      cfg.fixed_truth = get_number_array(t.at("point"), "experiment.truth.point");
    } else {
      throw ConfigError("experiment.truth.mode: expected 'uniform' or 'fixed'");
    }
  }
  if (obj.contains("quantile_levels")) {
    cfg.quantile_levels =
        get_number_array(obj.at("quantile_levels"), "experiment.quantile_levels");
  }
}

BudgetSweepConfig parse_budget_sweep(const json& obj) {
  require_keys(obj, "budget_sweep", {"targets", "target_eps", "trials_per_point"});
  BudgetSweepConfig sweep;
  if (!obj.contains("targets")) {
    throw ConfigError("budget_sweep: missing 'targets'");
  }
  sweep.targets = get_number_array(obj.at("targets"), "budget_sweep.targets");
  sweep.target_eps = get_number_or(obj, "budget_sweep", "target_eps", 0.1);
  sweep.trials_per_point = get_uint(obj, "budget_sweep", "trials_per_point", 1000);
  return sweep;
}

AnalysisConfig parse_analysis(const json& obj) {
  require_keys(obj, "analysis", {"tol", "dim", "eps_grid", "eps_max", "nu_values"});
  AnalysisConfig a;
  a.tol = get_number_or(obj, "analysis", "tol", 1e-10);
  a.dim = static_cast<unsigned>(get_uint(obj, "analysis", "dim", 1));
  a.eps_max = get_number_or(obj, "analysis", "eps_max", 0.99);
  if (obj.contains("eps_grid")) {
    const json& g = obj.at("eps_grid");
    if (g.is_array()) {
      a.eps_grid = get_number_array(g, "analysis.eps_grid");
    } else if (g.is_object()) {
      require_keys(g, "analysis.eps_grid", {"start", "stop", "step"});
      const double start = get_number(g, "analysis.eps_grid", "start");
      const double stop = get_number(g, "analysis.eps_grid", "stop");
      const double step = get_number(g, "analysis.eps_grid", "step");
      if (!(step > 0.0)) throw ConfigError("analysis.eps_grid.step: must be positive");
      for (double e = start; e <= stop + 1e-12; e += step) a.eps_grid.push_back(e);
    } else {
      throw ConfigError("analysis.eps_grid: expected array or {start,stop,step}");
    }
  }
  if (obj.contains("nu_values")) {
    a.nu_values = get_number_array(obj.at("nu_values"), "analysis.nu_values");
  }
  return a;
}

ContinuityConfig parse_continuity(const json& obj) {
  require_keys(obj, "continuity", {"q", "xi", "c"});
  ContinuityConfig c;
  c.q = get_number(obj, "continuity", "q");
  c.xi = get_number(obj, "continuity", "xi");
  c.c = get_number(obj, "continuity", "c");
  return c;
}

ParsedConfig parse_document(const json& doc) {
  require_keys(doc, "config",
               {"schema_version", "channel", "procedure", "engine", "sorted_pm",
                "experiment", "budget_sweep", "analysis", "continuity"});
  if (!doc.contains("schema_version")) {
    throw ConfigError("config: missing schema_version");
  }
  const json& ver = doc.at("schema_version");
  if (!ver.is_number_integer() || ver.get<int>() != 1) {
    throw ConfigError("config: unsupported schema_version (expected 1)");
  }

  ParsedConfig parsed;
  if (doc.contains("channel")) {
    parsed.channel = parse_channel(doc.at("channel"));
  }
  if (doc.contains("procedure")) {
    const json& p = doc.at("procedure");
    if (!p.is_string()) throw ConfigError("procedure: expected a string");
    try {
      parsed.procedure = procedure_from_name(p.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (doc.contains("engine") || doc.contains("experiment") || doc.contains("sorted_pm")) {
    if (!parsed.channel) {
      throw ConfigError("config: engine/experiment sections need a channel");
    }
    ExperimentConfig cfg;
    cfg.channel = *parsed.channel;
    if (parsed.procedure) cfg.procedure = *parsed.procedure;
    if (doc.contains("engine")) {
      cfg.engine = parse_engine(doc.at("engine"), cfg.channel);
    }
    if (doc.contains("sorted_pm")) {
      cfg.pm = parse_pm(doc.at("sorted_pm"));
    }
    if (doc.contains("experiment")) {
      parse_experiment(doc.at("experiment"), cfg);
    }
    parsed.experiment = std::move(cfg);
  }
  if (doc.contains("budget_sweep")) {
    parsed.budget_sweep = parse_budget_sweep(doc.at("budget_sweep"));
  }
  if (doc.contains("analysis")) {
    parsed.analysis = parse_analysis(doc.at("analysis"));
  }
  if (doc.contains("continuity")) {
    parsed.continuity = parse_continuity(doc.at("continuity"));
  }
  return parsed;
}

}  // namespace

ParsedConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  return parse_document(doc);
}

ParsedConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("config: cannot open file " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

}  // namespace twentyq
