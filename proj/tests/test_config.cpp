#include <doctest.h>

#include <cmath>

#include "twentyq/config.hpp"

using twentyq::ConfigError;
using twentyq::parse_config_text;

namespace {

const char* kMinimal = R"({
  "schema_version": 1,
  "channel": {"family": "mdBSC", "nu": 0.5, "f": {"a": 0.1, "b": 0.3}},
  "procedure": "alg1",
  "engine": {"bins_per_dim": 16, "dim": 1, "design_q": 0.38, "lambda": 5.0},
  "experiment": {"n_trials": 100, "master_seed": 9, "delta_eval": 0.0625}
})";

}  // namespace

TEST_SUITE_BEGIN("config");

TEST_CASE("a minimal document parses") {
  const auto cfg = parse_config_text(kMinimal);
  REQUIRE(cfg.channel.has_value());
  CHECK(cfg.channel->is_bsc());
  CHECK(cfg.channel->nu() == doctest::Approx(0.5));
  CHECK(cfg.channel->state_map()(0.0) == doctest::Approx(0.1));
  REQUIRE(cfg.experiment.has_value());
  CHECK(cfg.experiment->procedure == twentyq::Procedure::alg1);
  CHECK(cfg.experiment->engine.bins_per_dim == 16);
  CHECK(cfg.experiment->engine.lambda == doctest::Approx(5.0));
  CHECK(cfg.experiment->n_trials == 100);
  CHECK(cfg.experiment->master_seed == 9);
  CHECK(cfg.experiment->delta_eval == doctest::Approx(0.0625));
}

TEST_CASE("unknown keys are hard errors") {
  CHECK_THROWS_AS(parse_config_text(R"({"schema_version": 1, "chanel": {}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config_text(R"({
    "schema_version": 1,
    "channel": {"family": "mdBSC", "nu": 0.5, "f": {"a": 0.1, "b": 0.3}, "mu": 2}
  })"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config_text(R"({
    "schema_version": 1,
    "channel": {"family": "mdBSC", "nu": 0.5, "f": {"a": 0.1, "b": 0.3}},
    "engine": {"bins": 4}
  })"),
                  ConfigError);
}

TEST_CASE("schema versioning") {
  CHECK_THROWS_AS(parse_config_text(R"({"channel": {}})"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(R"({"schema_version": 2})"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("not json"), ConfigError);
}

TEST_CASE("derived engine settings resolve against the channel") {
  const auto cfg = parse_config_text(R"({
    "schema_version": 1,
    "channel": {"family": "mdBSC", "nu": 0.5, "f": {"a": 0.1, "b": 0.3}},
    "procedure": "alg1",
    "engine": {"bins_per_dim": 16, "design_q": "capacity-argmax",
               "lambda": {"target_eps": 0.1}}
  })");
  REQUIRE(cfg.experiment.has_value());
  CHECK(std::abs(cfg.experiment->engine.design_q - 0.378437) <= 1e-3);
  CHECK(cfg.experiment->engine.lambda ==
        doctest::Approx(std::log(15.0 / 0.1)).epsilon(1e-12));
}

TEST_CASE("channel constraints surface as config errors") {
  CHECK_THROWS_AS(parse_config_text(R"({
    "schema_version": 1,
    "channel": {"family": "mdBSC", "nu": 2.0, "f": {"a": 0.1, "b": 0.0}}
  })"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config_text(R"({
    "schema_version": 1,
    "channel": {"family": "mdBSC", "nu": 1.0, "f": {"a": 0.4, "b": 0.3}}
  })"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config_text(R"({
    "schema_version": 1,
    "channel": {"family": "something"}
  })"),
                  ConfigError);
}

TEST_CASE("tabulated channels, fixed truth, grids and sweeps parse") {
  const auto cfg = parse_config_text(R"({
    "schema_version": 1,
    "channel": {"family": "tabulated", "anchors": [
      {"state": 0.0, "rows": [[0.9, 0.1], [0.1, 0.9]]},
      {"state": 1.0, "rows": [[0.8, 0.2], [0.2, 0.8]]}
    ]},
    "procedure": "alg2",
    "engine": {"bins_per_dim": 4, "epsilon_term": 0.25, "lambda": 1.5},
    "experiment": {"truth": {"mode": "fixed", "point": [0.25]}, "n_trials": 10,
                   "delta_eval": 0.25},
    "budget_sweep": {"targets": [20, 40], "target_eps": 0.2, "trials_per_point": 50},
    "analysis": {"eps_grid": {"start": 0.0, "stop": 0.2, "step": 0.1}, "nu_values": [0.5]},
    "continuity": {"q": 0.4, "xi": 0.01, "c": 3.0}
  })");
  REQUIRE(cfg.channel.has_value());
  CHECK_FALSE(cfg.channel->is_bsc());
  CHECK(cfg.channel->transition_prob(0.5, 0, 0) == doctest::Approx(0.85));
  REQUIRE(cfg.experiment.has_value());
  CHECK(cfg.experiment->truth_mode == twentyq::TruthMode::fixed);
  CHECK(cfg.experiment->fixed_truth == std::vector<double>{0.25});
  CHECK(cfg.experiment->engine.epsilon_term == doctest::Approx(0.25));
  REQUIRE(cfg.budget_sweep.has_value());
  CHECK(cfg.budget_sweep->targets == std::vector<double>{20, 40});
  REQUIRE(cfg.analysis.has_value());
  REQUIRE(cfg.analysis->eps_grid.size() == 3);
  CHECK(cfg.analysis->eps_grid[2] == doctest::Approx(0.2));
  REQUIRE(cfg.continuity.has_value());
  CHECK(cfg.continuity->xi == doctest::Approx(0.01));
}

TEST_CASE("missing files are config errors") {
  CHECK_THROWS_AS(twentyq::load_config("/nonexistent/config.json"), ConfigError);
}

TEST_SUITE_END();
