#include "config.hpp"

#include <array>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rsl/presets.hpp"
#include "rsl/rand_field.hpp"

namespace rsl::lab {

const char* to_string(Experiment e) {
  switch (e) {
    case Experiment::Curvature: return "curvature";
    case Experiment::Lambda: return "lambda";
    case Experiment::Spectrum: return "spectrum";
    case Experiment::Decompose: return "decompose";
    case Experiment::SecondVar: return "secondvar";
    case Experiment::Flow: return "flow";
    case Experiment::Stability: return "stability";
    case Experiment::Monotonicity: return "monotonicity";
    case Experiment::GaugeTransfer: return "gauge-transfer";
  }
  return "?";
}

Experiment experiment_from_string(const std::string& s) {
  for (Experiment e :
       {Experiment::Curvature, Experiment::Lambda, Experiment::Spectrum,
        Experiment::Decompose, Experiment::SecondVar, Experiment::Flow,
        Experiment::Stability, Experiment::Monotonicity,
        Experiment::GaugeTransfer}) {
    if (s == to_string(e)) return e;
  }
  throw ConfigError("unknown experiment '" + s + "'");
}

namespace {

// the closed world: every legal key with its per-experiment default
struct KeyDefault {
  const char* key;
  const char* value;
};

const std::array<KeyDefault, 38> kKeys{{
    {"grid.dim", "2"},
    {"grid.n", "32"},
    {"grid.lengths", "6.2831853071795862"},
    {"grid.stencil", "spectral"},
    {"metric.type", "flat"},
    {"metric.amp", "0.1"},
    {"metric.wavenumber", "1"},
    {"metric.axis", "0"},
    {"perturbation.seed", "7"},
    {"perturbation.max_wavenumber", "2"},
    {"perturbation.amplitude", "0.01"},
    {"perturbation.constant_shift", ""},
    {"flow.kind", "deturck"},
    {"flow.dt_safety", "0.5"},
    {"flow.t_end", "10"},
    {"flow.record_every", "10"},
    {"flow.record_dt", "0.1"},
    {"flow.reference_updates", "off"},
    {"flow.reference_update_period", "2"},
    {"flow.record_lambda", "on"},
    {"flow.fit_t0", "0"},
    {"flow.fit_t1", "0"},
    {"spectrum.k", "10"},
    {"spectrum.max_basis", "120"},
    {"spectrum.max_sweeps", "40"},
    {"spectrum.dump_eigenfields", "off"},
    {"secondvar.count", "20"},
    {"secondvar.fd_step", "0"},
    {"experiment.seeds", "1"},
    {"tolerances.eig_tol", "1e-6"},
    {"tolerances.residual_tol", "1e-8"},
    {"tolerances.lambda_tol", "1e-11"},
    {"tolerances.cg_tol", "1e-12"},
    {"tolerances.flat_tol", "1e-8"},
    {"tolerances.monotonicity_slack", "1e-8"},
    {"tolerances.invariant_tol", "1e-6"},
    {"tolerances.rate_tol", "0.10"},
    {"output.dir", "out"},
}};

bool known_key(const std::string& key) {
  for (const auto& k : kKeys)
    if (key == k.key) return true;
  return false;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

ExperimentConfig ExperimentConfig::defaults(Experiment e) {
  ExperimentConfig cfg;
  cfg.experiment_ = e;
  for (const auto& k : kKeys) cfg.values_[k.key] = k.value;
  // per-experiment default adjustments
  switch (e) {
    case Experiment::Stability:
    case Experiment::Spectrum:
      cfg.values_["grid.dim"] = "3";
      cfg.values_["grid.n"] = "16";
      break;
    case Experiment::Monotonicity:
      cfg.values_["flow.kind"] = "ricci";
      cfg.values_["flow.t_end"] = "5";
      cfg.values_["grid.n"] = "24";
      break;
    case Experiment::GaugeTransfer:
      cfg.values_["flow.t_end"] = "5";
      cfg.values_["perturbation.amplitude"] = "1e-3";
      cfg.values_["grid.n"] = "24";
      cfg.values_["flow.fit_t0"] = "1";
      cfg.values_["flow.fit_t1"] = "4.5";
      break;
    default:
      break;
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::parse(Experiment e, const std::string& text) {
  ExperimentConfig cfg = defaults(e);
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty())
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": key outside any [section]");
    const std::string full = section + "." + key;
    if (!known_key(full))
      throw ConfigError("unknown config key '" + full + "'");
    cfg.values_[full] = value;
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(Experiment e, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(e, ss.str());
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (!known_key(key)) throw ConfigError("unknown config key '" + key + "'");
  values_[key] = value;
}

std::string ExperimentConfig::get_string(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
  return it->second;
}

int ExperimentConfig::get_int(const std::string& key) const {
  const std::string v = get_string(key);
  try {
    std::size_t pos = 0;
    const int x = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected integer, got '" + v +
                      "'");
  }
}

double ExperimentConfig::get_double(const std::string& key) const {
  const std::string v = get_string(key);
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected number, got '" + v +
                      "'");
  }
}

bool ExperimentConfig::get_bool(const std::string& key) const {
  const std::string v = get_string(key);
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  throw ConfigError("config key '" + key + "': expected on/off, got '" + v +
                    "'");
}

std::vector<double> ExperimentConfig::get_doubles(const std::string& key) const {
  const std::string v = get_string(key);
  std::vector<double> out;
  std::istringstream in(v);
  std::string tok;
  while (in >> tok) {
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': expected numbers, got '" +
                        v + "'");
    }
  }
  return out;
}

GridSpec ExperimentConfig::grid() const {
  const int dim = get_int("grid.dim");
  const int n = get_int("grid.n");
  std::vector<double> lengths = get_doubles("grid.lengths");
  if (lengths.empty()) throw ConfigError("grid.lengths must not be empty");
  if (static_cast<int>(lengths.size()) == 1)
    lengths.assign(static_cast<std::size_t>(dim), lengths[0]);
  if (static_cast<int>(lengths.size()) != dim)
    throw ConfigError("grid.lengths needs 1 or dim entries");
  DiffScheme scheme;
  try {
    scheme = diff_scheme_from_string(get_string("grid.stencil"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  try {
    return GridSpec::torus(dim, n, lengths, scheme);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid grid: ") + e.what());
  }
}

std::string ExperimentConfig::echo() const {
  std::string out = "# resolved configuration (experiment: ";
  out += to_string(experiment_);
  out += ")\n";
  std::string section;
  for (const auto& k : kKeys) {
    const std::string key = k.key;
    const std::string sec = key.substr(0, key.find('.'));
    if (sec != section) {
      section = sec;
      out += "[" + section + "]\n";
    }
    out += key.substr(key.find('.') + 1) + " = " + values_.at(key) + "\n";
  }
  return out;
}

MetricField metric_from_config(const ExperimentConfig& cfg) {
  const GridSpec g = cfg.grid();
  const std::string type = cfg.get_string("metric.type");
  const double amp = cfg.get_double("metric.amp");
  const int wavenumber = cfg.get_int("metric.wavenumber");
  const int axis = cfg.get_int("metric.axis");
  try {
    if (type == "flat") return MetricField::identity(g);
    if (type == "conformal") return conformal_metric(g, amp, wavenumber, axis);
    if (type == "scaled") return scaled_identity_metric(g, amp, wavenumber, axis);
    if (type == "shear") return shear_metric(g, amp);
    if (type == "product") return product_conformal_metric(g, amp, wavenumber);
    if (type == "perturbed") {
      SymTensorField t = MetricField::identity(g);
      t.add_scaled(1.0, band_limited_perturbation(
                            g, cfg.seed(),
                            cfg.get_int("perturbation.max_wavenumber"),
                            cfg.get_double("perturbation.amplitude")));
      return MetricField::from_tensor(t);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid metric: ") + e.what());
  } catch (const std::domain_error& e) {
    throw ConfigError(std::string("invalid metric: ") + e.what());
  }
  throw ConfigError("unknown metric.type '" + type + "'");
}

}  // namespace rsl::lab
