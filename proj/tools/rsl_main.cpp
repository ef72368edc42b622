#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "config.hpp"
#include "experiments.hpp"

using namespace rsl::lab;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  int seed = -1;
  int jobs = 1;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "config file (key = value sections)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "override perturbation.seed");
  cmd->add_option("--out", o.out_dir, "output directory (or env RSL_OUT)");
  cmd->add_option("--jobs", o.jobs, "worker threads for seed sweeps")
      ->check(CLI::PositiveNumber);
}

int run(Experiment e, const CommonOpts& o) {
  ExperimentConfig cfg = o.config_path.empty()
                             ? ExperimentConfig::defaults(e)
                             : ExperimentConfig::load(e, o.config_path);
  if (o.seed >= 0) cfg.set("perturbation.seed", std::to_string(o.seed));
  cfg.output_dir = cfg.get_string("output.dir");
  if (const char* env = std::getenv("RSL_OUT"); env && *env)
    cfg.output_dir = env;
  if (!o.out_dir.empty()) cfg.output_dir = o.out_dir;
  return run_experiment(cfg, o.jobs);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "rsl - Ricci flow stability laboratory on periodic grids"};
  app.require_subcommand(1);

  int result = 0;
  std::array<CommonOpts, 16> opts;
  int next_opt = 0;
  for (Experiment e :
       {Experiment::Curvature, Experiment::Lambda, Experiment::Spectrum,
        Experiment::Decompose, Experiment::SecondVar, Experiment::Flow,
        Experiment::Stability, Experiment::Monotonicity,
        Experiment::GaugeTransfer}) {
    CommonOpts& o = opts[next_opt++];
    CLI::App* cmd = app.add_subcommand(to_string(e), "run the experiment");
    add_common(cmd, o);
    cmd->callback([e, &o, &result]() { result = run(e, o); });
  }

  std::string cmp_a, cmp_b;
  double cmp_dev = -1.0;
  CLI::App* cmp = app.add_subcommand("compare", "aligned-time diff of two runs");
  cmp->add_option("dir_a", cmp_a, "first run directory")->required();
  cmp->add_option("dir_b", cmp_b, "second run directory")->required();
  cmp->add_option("--max-dev", cmp_dev, "fail when max invariant dev exceeds");
  cmp->callback(
      [&]() { result = compare_runs(cmp_a, cmp_b, cmp_dev); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kSolverFailure;
  }
  return result;
}
