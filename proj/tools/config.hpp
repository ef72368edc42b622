#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "rsl/field.hpp"
#include "rsl/grid.hpp"

namespace rsl::lab {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Experiment names accepted on the command line.
enum class Experiment {
  Curvature,
  Lambda,
  Spectrum,
  Decompose,
  SecondVar,
  Flow,
  Stability,
  Monotonicity,
  GaugeTransfer,
};
const char* to_string(Experiment e);
Experiment experiment_from_string(const std::string& s);

/// Closed-world key = value configuration with [section] headers.  Unknown
/// sections or keys are rejected; every run writes a fully resolved echo so
/// results are re-runnable bit for bit.
class ExperimentConfig {
 public:
  /// Parse a config file on top of the experiment's defaults.
  static ExperimentConfig load(Experiment e, const std::string& path);
  static ExperimentConfig defaults(Experiment e);
  /// Parse config text (tests).
  static ExperimentConfig parse(Experiment e, const std::string& text);

  Experiment experiment() const { return experiment_; }

  // typed getters (key = "section.name")
  int get_int(const std::string& key) const;
  double get_double(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key) const;

  void set(const std::string& key, const std::string& value);

  /// Grid and seeded-perturbation shortcuts used by every experiment.
  GridSpec grid() const;
  std::uint64_t seed() const { return static_cast<std::uint64_t>(get_int("perturbation.seed")); }

  /// Fully resolved canonical text (defaults materialized, fixed key order).
  std::string echo() const;

  std::string output_dir;  // resolved from --out / RSL_OUT / output.dir

 private:
  Experiment experiment_ = Experiment::Flow;
  std::map<std::string, std::string> values_;  // "section.key" -> value
};

/// Metric described by the [metric] section.
MetricField metric_from_config(const ExperimentConfig& cfg);

}  // namespace rsl::lab
