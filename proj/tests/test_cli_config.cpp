#include <doctest.h>

#include "config.hpp"

using namespace rsl::lab;

TEST_CASE("config parses sections, comments and values") {
  const std::string text = R"(
# comment
[grid]
dim = 3
n = 16          # trailing comment
lengths = 6.2831853071795862
[perturbation]
seed = 42
amplitude = 1e-3
)";
  auto cfg = ExperimentConfig::parse(Experiment::Flow, text);
  CHECK(cfg.get_int("grid.dim") == 3);
  CHECK(cfg.get_int("grid.n") == 16);
  CHECK(cfg.seed() == 42);
  CHECK(cfg.get_double("perturbation.amplitude") == 1e-3);
  // untouched keys keep their defaults
  CHECK(cfg.get_string("flow.kind") == "deturck");

  auto grid = cfg.grid();
  CHECK(grid.dim == 3);
  CHECK(grid.scheme == rsl::DiffScheme::Spectral);
}

TEST_CASE("unknown keys and sections are rejected (closed world)") {
  CHECK_THROWS_AS(ExperimentConfig::parse(Experiment::Flow, "[grid]\nnn = 3\n"),
                  ConfigError);
  CHECK_THROWS_AS(
      ExperimentConfig::parse(Experiment::Flow, "[nosuch]\ndim = 3\n"),
      ConfigError);
  CHECK_THROWS_AS(
      ExperimentConfig::parse(Experiment::Flow, "dim = 3\n"),  // no section
      ConfigError);
  CHECK_THROWS_AS(
      ExperimentConfig::parse(Experiment::Flow, "[grid]\ndim 3\n"),
      ConfigError);
}

TEST_CASE("typed getters validate their input") {
  auto cfg = ExperimentConfig::parse(Experiment::Flow,
                                     "[grid]\ndim = banana\n");
  CHECK_THROWS_AS(cfg.get_int("grid.dim"), ConfigError);
  CHECK_THROWS_AS(
      ExperimentConfig::defaults(Experiment::Flow).get_bool("grid.dim"),
      ConfigError);
}

TEST_CASE("echo round-trips to an identical configuration") {
  auto cfg = ExperimentConfig::parse(
      Experiment::Monotonicity,
      "[perturbation]\nseed = 11\n[flow]\nt_end = 2.5\n");
  const std::string echo1 = cfg.echo();
  auto cfg2 = ExperimentConfig::parse(Experiment::Monotonicity, echo1);
  CHECK(cfg2.echo() == echo1);
  CHECK(cfg2.get_double("flow.t_end") == 2.5);
}

TEST_CASE("experiment defaults differ where the experiments need them") {
  CHECK(ExperimentConfig::defaults(Experiment::Stability).get_int("grid.dim") ==
        3);
  CHECK(ExperimentConfig::defaults(Experiment::Flow).get_int("grid.dim") == 2);
  CHECK(ExperimentConfig::defaults(Experiment::Monotonicity)
            .get_string("flow.kind") == "ricci");
}

TEST_CASE("metric presets are reachable from config") {
  auto cfg = ExperimentConfig::parse(Experiment::Lambda,
                                     "[metric]\ntype = scaled\namp = 0.2\n");
  auto m = metric_from_config(cfg);
  CHECK(!m.is_constant());
  auto bad = ExperimentConfig::parse(Experiment::Lambda,
                                     "[metric]\ntype = nosuch\n");
  CHECK_THROWS_AS(metric_from_config(bad), ConfigError);
}
