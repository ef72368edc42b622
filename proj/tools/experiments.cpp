#include "experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <thread>

#include "rsl/curvature.hpp"
#include "rsl/decompose.hpp"
#include "rsl/flow.hpp"
#include "rsl/inner.hpp"
#include "rsl/lambda.hpp"
#include "rsl/operators.hpp"
#include "rsl/rand_field.hpp"
#include "rsl/second_variation.hpp"
#include "rsl/snapshot.hpp"
#include "rsl/spectrum.hpp"
#include "rsl/trace_io.hpp"

namespace rsl::lab {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct Assertion {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double bound = 0.0;
};

struct Reporter {
  std::string dir;
  std::vector<Assertion> assertions;
  bool solver_failure = false;
  std::string solver_detail;

  void check(const std::string& name, double value, double bound) {
    assertions.push_back({name, value <= bound, value, bound});
  }
  void check_flag(const std::string& name, bool pass) {
    assertions.push_back({name, pass, pass ? 1.0 : 0.0, 1.0});
  }
  void fail_solver(const std::string& detail) {
    solver_failure = true;
    solver_detail = detail;
  }

  int finish(json& summary) {
    json as = json::array();
    bool all_pass = true;
    for (const auto& a : assertions) {
      as.push_back({{"name", a.name},
                    {"pass", a.pass},
                    {"value", a.value},
                    {"bound", a.bound}});
      all_pass = all_pass && a.pass;
    }
    summary["assertions"] = as;
    summary["solver_failure"] = solver_failure;
    if (solver_failure) summary["solver_detail"] = solver_detail;
    const int code = solver_failure ? kSolverFailure
                     : all_pass     ? kOk
                                    : kAssertionFailed;
    summary["exit_code"] = code;
    std::ofstream out(dir + "/summary.json");
    out << summary.dump(2) << "\n";
    std::fprintf(stderr, "[rsl] %s: %s (exit %d)\n", dir.c_str(),
                 code == kOk ? "pass" : "FAIL", code);
    return code;
  }
};

Reporter make_reporter(const ExperimentConfig& cfg) {
  Reporter r;
  r.dir = cfg.output_dir;
  fs::create_directories(r.dir);
  std::ofstream echo(r.dir + "/echo.cfg");
  echo << cfg.echo();
  return r;
}

MetricField initial_metric(const ExperimentConfig& cfg) {
  const GridSpec g = cfg.grid();
  SymTensorField t = MetricField::identity(g);
  const auto shift = cfg.get_doubles("perturbation.constant_shift");
  if (!shift.empty()) {
    if (static_cast<int>(shift.size()) != g.sym_components())
      throw ConfigError("perturbation.constant_shift needs dim(dim+1)/2 entries");
    for (std::size_t n = 0; n < g.node_count(); ++n)
      for (int c = 0; c < g.sym_components(); ++c) t.at(n, c) += shift[c];
  }
  t.add_scaled(1.0,
               band_limited_perturbation(
                   g, cfg.seed(), cfg.get_int("perturbation.max_wavenumber"),
                   cfg.get_double("perturbation.amplitude")));
  try {
    return MetricField::from_tensor(t);
  } catch (const std::domain_error&) {
    throw ConfigError("initial data is not positive definite");
  }
}

FlowConfig flow_config(const ExperimentConfig& cfg, const MetricField& g0) {
  FlowConfig fc;
  const std::string kind = cfg.get_string("flow.kind");
  if (kind == "ricci")
    fc.kind = FlowKind::Ricci;
  else if (kind == "deturck")
    fc.kind = FlowKind::DeTurck;
  else
    throw ConfigError("flow.kind must be ricci or deturck");
  fc.background = g0;
  fc.dt_safety = cfg.get_double("flow.dt_safety");
  if (!(fc.dt_safety > 0.0) || fc.dt_safety > 1.0)
    throw ConfigError("flow.dt_safety must lie in (0, 1]");
  fc.t_end = cfg.get_double("flow.t_end");
  fc.record_every = cfg.get_int("flow.record_every");
  fc.record_dt = cfg.get_double("flow.record_dt");
  fc.reference_updates = cfg.get_bool("flow.reference_updates");
  fc.reference_update_period = cfg.get_double("flow.reference_update_period");
  if (fc.reference_updates && !(fc.reference_update_period > 0.0))
    throw ConfigError("reference updates need a positive period");
  fc.record_lambda = cfg.get_bool("flow.record_lambda");
  fc.lambda_tol = cfg.get_double("tolerances.lambda_tol");
  return fc;
}

SpectrumSettings spectrum_settings(const ExperimentConfig& cfg) {
  SpectrumSettings s;
  s.k = cfg.get_int("spectrum.k");
  s.max_basis = cfg.get_int("spectrum.max_basis");
  s.max_sweeps = cfg.get_int("spectrum.max_sweeps");
  s.eig_tol_rel = cfg.get_double("tolerances.eig_tol");
  s.residual_tol = cfg.get_double("tolerances.residual_tol");
  s.seed = cfg.seed();
  return s;
}

void write_flow_artifacts(const std::string& dir, const std::string& stem,
                          const FlowTrace& trace, const FlowConfig& fc) {
  write_trace_csv(dir + "/" + stem + ".csv", trace);
  write_invariants_csv(dir + "/" + stem + "_invariants.csv", trace);
  std::ofstream out(dir + "/" + stem + "_summary.json");
  out << trace_summary_json(trace, fc) << "\n";
  for (std::size_t i = 0; i < trace.reference_metrics.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof(name), "/%s_ref_%03zu.rsl", stem.c_str(), i + 1);
    save_snapshot(dir + name, trace.reference_metrics[i]);
  }
}

// ---------------------------------------------------------------------------

int run_curvature(const ExperimentConfig& cfg, Reporter& rep) {
  MetricField g = metric_from_config(cfg);
  CurvaturePack pack = curvature_of(g);
  const GridSpec& grid = g.grid();
  const int dim = grid.dim;

  double alt_ab = 0.0, alt_cd = 0.0, contraction = 0.0;
  const double scale = std::max(1e-300, pack.riemann.sup_norm());
  for (std::size_t n = 0; n < grid.node_count(); ++n) {
    const SymMat gi = pack.inv_metric.matrix_at(n);
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b)
        for (int c = 0; c < dim; ++c)
          for (int d = 0; d < dim; ++d) {
            alt_ab = std::max(alt_ab, std::abs(pack.riemann.at(n, a, b, c, d) +
                                               pack.riemann.at(n, b, a, c, d)));
            alt_cd = std::max(alt_cd, std::abs(pack.riemann.at(n, a, b, c, d) +
                                               pack.riemann.at(n, a, b, d, c)));
          }
    for (int b = 0; b < dim; ++b)
      for (int c = 0; c < dim; ++c) {
        double s = 0.0;
        for (int a = 0; a < dim; ++a)
          for (int d = 0; d < dim; ++d)
            s += gi(a, d) * pack.riemann.at(n, a, b, c, d);
        contraction = std::max(contraction, std::abs(s - pack.ricci.at(n, b, c)));
      }
  }

  json j;
  j["experiment"] = "curvature";
  j["metric_type"] = cfg.get_string("metric.type");
  j["sup"] = {{"riemann", pack.riemann.sup_norm()},
              {"ricci", pack.ricci.sup_norm()},
              {"scalar", pack.scalar.sup_norm()}};
  j["defects"] = {{"antisym_first_pair", alt_ab},
                  {"antisym_second_pair", alt_cd},
                  {"ricci_contraction", contraction}};

  if (g.is_constant()) {
    rep.check("flat_certificate_riemann", pack.riemann.sup_norm(), 1e-12);
    rep.check("flat_certificate_ricci", pack.ricci.sup_norm(), 1e-12);
    rep.check("flat_certificate_scalar", pack.scalar.sup_norm(), 1e-12);
  } else {
    rep.check("antisym_first_pair", alt_ab, 1e-12 * std::max(1.0, scale));
    rep.check("antisym_second_pair", alt_cd, 0.05 * scale);
    rep.check("ricci_contraction", contraction, 0.05 * scale);
  }

  save_snapshot(rep.dir + "/metric.rsl", g);
  write_csv(rep.dir + "/scalar_curvature.csv", pack.scalar);
  return rep.finish(j);
}

int run_lambda(const ExperimentConfig& cfg, Reporter& rep) {
  MetricField g = metric_from_config(cfg);
  LambdaSettings ls;
  ls.tol = cfg.get_double("tolerances.lambda_tol");
  LambdaResult lam = lambda_of(g, ls);
  json j;
  j["experiment"] = "lambda";
  j["metric_type"] = cfg.get_string("metric.type");
  j["lambda"] = lam.value;
  j["consistency_gap"] = lam.consistency_gap;
  j["iterations"] = lam.iterations;
  j["residual"] = lam.residual;
  if (!lam.converged) {
    rep.fail_solver("lambda eigensolve did not converge");
    return rep.finish(j);
  }
  const double eig_tol = cfg.get_double("tolerances.eig_tol");
  rep.check("consistency_F_equals_lambda", lam.consistency_gap,
            eig_tol * (1.0 + std::abs(lam.value)));
  bool positive = true;
  for (std::size_t n = 0; n < g.grid().node_count(); ++n)
    positive = positive && lam.ground_state[n] > 0.0;
  rep.check_flag("ground_state_positive", positive);

  // infimum bound with the constant trial potential: lambda <= mean_dV R
  auto w = volume_weight(g);
  ScalarField scal(g.grid());
  if (!g.is_constant()) scal = curvature_of(g).scalar;
  const double rbar = mean(scal, w);
  j["mean_scalar_curvature"] = rbar;
  rep.check("lambda_below_mean_R", lam.value - rbar,
            eig_tol * (1.0 + std::abs(lam.value)));
  save_snapshot(rep.dir + "/ground_state.rsl", lam.ground_state);
  write_csv(rep.dir + "/ground_state.csv", lam.ground_state);
  return rep.finish(j);
}

int run_spectrum(const ExperimentConfig& cfg, Reporter& rep, bool verdict_mode) {
  MetricField g = metric_from_config(cfg);
  SpectrumSettings s = spectrum_settings(cfg);
  if (verdict_mode) s.tt_project = g.is_constant();
  SpectralReport report = lichnerowicz_spectrum(g, s.k, s);

  json j = json::parse(report_to_json(report));
  j["experiment"] = verdict_mode ? "stability" : "spectrum";
  j["tt_projected"] = s.tt_project;

  if (cfg.get_bool("spectrum.dump_eigenfields")) {
    for (std::size_t i = 0; i < report.lichnerowicz_eigs.size(); ++i) {
      char name[64];
      std::snprintf(name, sizeof(name), "/eigenfield_%03zu.rsl", i);
      save_snapshot(rep.dir + name, report.lichnerowicz_eigs[i].field);
    }
  }

  if (!report.converged && report.verdict == Verdict::Inconclusive) {
    rep.fail_solver("lanczos did not resolve the requested spectrum");
    return rep.finish(j);
  }
  for (const auto& p : report.lichnerowicz_eigs)
    rep.check("eigenpair_residual(" + std::to_string(p.value) + ")",
              p.residual, report.residual_threshold);
  if (verdict_mode)
    rep.check_flag("verdict_resolved", report.verdict != Verdict::Inconclusive);
  return rep.finish(j);
}

int run_decompose(const ExperimentConfig& cfg, Reporter& rep) {
  const GridSpec grid = cfg.grid();
  MetricField g = MetricField::identity(grid);
  SymTensorField h = band_limited_perturbation(
      grid, cfg.seed(), cfg.get_int("perturbation.max_wavenumber"),
      cfg.get_double("perturbation.amplitude"));
  DecomposeSettings ds;
  ds.cg.tol = cfg.get_double("tolerances.cg_tol");
  Decomposition d = decompose(h, g, ds);

  auto w = volume_weight(g);
  const double h2 = std::max(1e-300, inner_product(h, h, w));
  const SymTensorField* parts[] = {&d.c_part, &d.e_part, &d.n_part, &d.g_part,
                                   &d.s_part};
  const char* names[] = {"c", "e", "n", "g", "s"};
  double max_overlap = 0.0;
  json norms;
  for (int i = 0; i < 5; ++i) {
    norms[names[i]] = l2_norm(*parts[i], w);
    for (int k = i + 1; k < 5; ++k)
      max_overlap = std::max(
          max_overlap, std::abs(inner_product(*parts[i], *parts[k], w)) / h2);
  }
  SymTensorField inv = g.inverse_field();
  const double tt_div = divergence(d.n_part, g).sup_norm();
  const double tt_tr = trace_field(d.n_part, inv).sup_norm();

  json j;
  j["experiment"] = "decompose";
  j["part_l2_norms"] = norms;
  j["residual_sup"] = d.residual.sup_norm();
  j["max_pairwise_overlap"] = max_overlap;
  j["tt_divergence_sup"] = tt_div;
  j["tt_trace_sup"] = tt_tr;

  if (!d.converged) {
    rep.fail_solver("decomposition solves did not converge");
    return rep.finish(j);
  }
  const double hsup = std::max(1e-300, h.sup_norm());
  rep.check("residual_sup", d.residual.sup_norm(), 1e-8 * std::max(1.0, hsup));
  rep.check("max_pairwise_overlap", max_overlap, 1e-8);
  rep.check("tt_divergence", tt_div, 1e-8 * std::max(1.0, hsup));
  rep.check("tt_trace", tt_tr, 1e-8 * std::max(1.0, hsup));
  return rep.finish(j);
}

int run_secondvar(const ExperimentConfig& cfg, Reporter& rep) {
  const GridSpec grid = cfg.grid();
  MetricField g0 = MetricField::identity(grid);
  auto w = volume_weight(g0);
  const int count = cfg.get_int("secondvar.count");
  const int band = cfg.get_int("perturbation.max_wavenumber");
  const std::uint64_t seed = cfg.seed();

  double max_gauge_null = 0.0, max_scale_null = 0.0;
  bool all_converged = true;
  for (int i = 0; i < count; ++i) {
    VectorField X = band_limited_vector(grid, seed + 1000 + i, band, 0.1);
    SymTensorField h = div_adjoint(X, g0);
    auto sv = second_variation_L(h, g0);
    all_converged = all_converged && sv.converged;
    const double h2 = std::max(1e-300, inner_product(h, h, w));
    max_gauge_null = std::max(max_gauge_null, std::abs(sv.quad) / h2);
  }
  {
    SymTensorField hg = g0;
    hg.scale(0.37);
    auto sv = second_variation_L(hg, g0);
    all_converged = all_converged && sv.converged;
    max_scale_null = std::abs(sv.quad) / inner_product(hg, hg, w);
  }

  // operator vs 5-point FD of lambda, per unit Vol
  double fd_step = cfg.get_double("secondvar.fd_step");
  if (fd_step <= 0.0) fd_step = 0.5 * grid.min_spacing();
  double max_fd_dev = 0.0;
  for (int i = 0; i < count; ++i) {
    SymTensorField h =
        band_limited_perturbation(grid, seed + 2000 + i, band, 0.05);
    auto sv = second_variation_L(h, g0);
    all_converged = all_converged && sv.converged;
    auto lam_at = [&](double s) {
      SymTensorField t = g0;
      t.add_scaled(s, h);
      LambdaResult r = lambda_of(MetricField::from_tensor(t));
      if (!r.converged) all_converged = false;
      return r.value;
    };
    const double l0 = lam_at(0.0);
    const double fd = (-lam_at(2 * fd_step) + 16.0 * lam_at(fd_step) -
                       30.0 * l0 + 16.0 * lam_at(-fd_step) -
                       lam_at(-2 * fd_step)) /
                      (12.0 * fd_step * fd_step);
    const double op = sv.quad / w.total;
    max_fd_dev = std::max(max_fd_dev,
                          std::abs(op - fd) / std::max(1e-300, std::abs(op)));
  }

  json j;
  j["experiment"] = "secondvar";
  j["count"] = count;
  j["fd_step"] = fd_step;
  j["max_gauge_null"] = max_gauge_null;
  j["max_scale_null"] = max_scale_null;
  j["max_fd_rel_dev"] = max_fd_dev;

  if (!all_converged) {
    rep.fail_solver("a lambda or Poisson solve did not converge");
    return rep.finish(j);
  }
  rep.check("gauge_null", max_gauge_null, 1e-8);
  rep.check("scale_null", max_scale_null, 1e-8);
  rep.check("fd_consistency_rel", max_fd_dev, 1e-3);
  return rep.finish(j);
}

int run_flow(const ExperimentConfig& cfg, Reporter& rep) {
  const GridSpec grid = cfg.grid();
  MetricField g0 = MetricField::identity(grid);
  MetricField start = initial_metric(cfg);
  FlowConfig fc = flow_config(cfg, g0);
  FlowTrace trace = evolve(start, fc);

  const double fit_t0 = cfg.get_double("flow.fit_t0");
  const double fit_t1 = cfg.get_double("flow.fit_t1");
  if (trace.completed && fit_t1 > fit_t0) {
    try {
      DecayFit fit = fit_decay_rate(trace, fit_t0, fit_t1);
      trace.fitted_decay_rate = fit.rate;
      trace.fit_residual = fit.residual;
    } catch (const std::invalid_argument&) {
      // window without usable samples: leave the rate unset
    }
  }
  write_flow_artifacts(rep.dir, "trace", trace, fc);

  json j;
  j["experiment"] = "flow";
  j["completed"] = trace.completed;
  j["final_time"] = trace.final_time;
  if (!trace.failure_reason.empty()) {
    j["failure_reason"] = trace.failure_reason;
    j["failure_time"] = trace.failure_time;
  }
  if (trace.fitted_decay_rate) j["fitted_decay_rate"] = *trace.fitted_decay_rate;

  bool finite = true;
  for (const auto& s : trace.samples)
    finite = finite && std::isfinite(s.l2_dist) && std::isfinite(s.sup_dist);
  rep.check_flag("diagnostics_finite", finite);
  rep.check_flag("completed_to_t_end", trace.completed);
  return rep.finish(j);
}

int run_monotonicity(const ExperimentConfig& cfg, Reporter& rep, int jobs) {
  const GridSpec grid = cfg.grid();
  const int count = cfg.get_int("experiment.seeds");
  const double slack_rel = cfg.get_double("tolerances.monotonicity_slack");
  MetricField g0 = MetricField::identity(grid);

  struct SeedResult {
    bool completed = false;
    double worst_drop = 0.0;  // most negative lambda increment beyond slack
    FlowTrace trace;
  };
  std::vector<SeedResult> results(count);

  auto run_seed = [&](int i) {
    ExperimentConfig c = cfg;
    c.set("perturbation.seed",
          std::to_string(cfg.get_int("perturbation.seed") + i));
    MetricField start = initial_metric(c);
    FlowConfig fc = flow_config(c, g0);
    fc.kind = FlowKind::Ricci;
    fc.record_lambda = true;
    SeedResult r;
    r.trace = evolve(start, fc);
    r.completed = r.trace.completed;
    for (std::size_t k = 0; k + 1 < r.trace.samples.size(); ++k) {
      const double slack =
          slack_rel * (1.0 + std::abs(r.trace.samples[k].lambda));
      const double inc =
          r.trace.samples[k + 1].lambda - r.trace.samples[k].lambda;
      if (inc < -slack) r.worst_drop = std::min(r.worst_drop, inc + slack);
    }
    results[i] = std::move(r);
  };

  const int workers = std::max(1, std::min(jobs, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) run_seed(i);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int t = 0; t < workers; ++t)
      pool.emplace_back([&]() {
        int i;
        while ((i = next.fetch_add(1)) < count) run_seed(i);
      });
    for (auto& t : pool) t.join();
  }

  json per_seed = json::array();
  bool all_completed = true, monotone = true;
  for (int i = 0; i < count; ++i) {
    char stem[32];
    std::snprintf(stem, sizeof(stem), "trace_seed%02d", i);
    FlowConfig fc;
    fc.kind = FlowKind::Ricci;
    write_flow_artifacts(rep.dir, stem, results[i].trace, fc);
    per_seed.push_back({{"seed", cfg.get_int("perturbation.seed") + i},
                        {"completed", results[i].completed},
                        {"worst_drop_beyond_slack", results[i].worst_drop}});
    all_completed = all_completed && results[i].completed;
    monotone = monotone && results[i].worst_drop == 0.0;
  }

  json j;
  j["experiment"] = "monotonicity";
  j["seeds"] = per_seed;
  rep.check_flag("all_runs_completed", all_completed);
  rep.check_flag("lambda_nondecreasing_within_slack", monotone);
  return rep.finish(j);
}

int run_gauge_transfer(const ExperimentConfig& cfg, Reporter& rep) {
  const GridSpec grid = cfg.grid();
  MetricField g0 = MetricField::identity(grid);
  MetricField start = initial_metric(cfg);
  FlowConfig fc = flow_config(cfg, g0);
  fc.kind = FlowKind::DeTurck;
  if (fc.record_dt <= 0.0)
    throw ConfigError("gauge-transfer needs flow.record_dt > 0 (matched times)");
  FlowTrace dt_trace = evolve(start, fc);
  write_flow_artifacts(rep.dir, "deturck", dt_trace, fc);

  json j;
  j["experiment"] = "gauge-transfer";
  if (!dt_trace.completed) {
    j["failure_reason"] = dt_trace.failure_reason;
    rep.check_flag("deturck_completed", false);
    return rep.finish(j);
  }

  const double fit_t0 = cfg.get_double("flow.fit_t0");
  const double fit_t1 = cfg.get_double("flow.fit_t1");
  GaugeTransferReport gt = gauge_transfer_check(
      dt_trace, start, fc, fit_t0, fit_t1,
      cfg.get_double("tolerances.invariant_tol"),
      cfg.get_double("tolerances.rate_tol"));
  FlowConfig rc = fc;
  rc.kind = FlowKind::Ricci;
  write_flow_artifacts(rep.dir, "ricci", gt.ricci_trace, rc);

  j["max_lambda_dev"] = gt.max_lambda_dev;
  j["max_vol_dev"] = gt.max_vol_dev;
  j["max_scalar_dev"] = gt.max_scalar_dev;
  j["rate_deturck"] = gt.rate_deturck;
  j["rate_ricci"] = gt.rate_ricci;
  j["rate_rel_dev"] = gt.rate_rel_dev;

  rep.check_flag("ricci_completed", gt.ricci_trace.completed);
  rep.check("lambda_invariance", gt.max_lambda_dev,
            cfg.get_double("tolerances.invariant_tol"));
  rep.check("vol_invariance", gt.max_vol_dev,
            cfg.get_double("tolerances.invariant_tol"));
  rep.check("ricci_norm_rate_agreement", gt.rate_rel_dev,
            cfg.get_double("tolerances.rate_tol"));
  return rep.finish(j);
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg, int jobs) {
  Reporter rep = make_reporter(cfg);
  switch (cfg.experiment()) {
    case Experiment::Curvature: return run_curvature(cfg, rep);
    case Experiment::Lambda: return run_lambda(cfg, rep);
    case Experiment::Spectrum: return run_spectrum(cfg, rep, false);
    case Experiment::Stability: return run_spectrum(cfg, rep, true);
    case Experiment::Decompose: return run_decompose(cfg, rep);
    case Experiment::SecondVar: return run_secondvar(cfg, rep);
    case Experiment::Flow: return run_flow(cfg, rep);
    case Experiment::Monotonicity: return run_monotonicity(cfg, rep, jobs);
    case Experiment::GaugeTransfer: return run_gauge_transfer(cfg, rep);
  }
  throw ConfigError("unhandled experiment");
}

// ---------------------------------------------------------------------------

namespace {

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

Csv read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  Csv csv;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path + " is empty");
  std::stringstream hs(line);
  std::string tok;
  while (std::getline(hs, tok, ',')) csv.header.push_back(tok);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::vector<double> row;
    while (std::getline(ls, tok, ',')) row.push_back(std::stod(tok));
    if (row.size() != csv.header.size())
      throw ConfigError(path + ": ragged csv row");
    csv.rows.push_back(std::move(row));
  }
  return csv;
}

double unit_floor_dev(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

int compare_runs(const std::string& dir_a, const std::string& dir_b,
                 double max_dev, std::string* report_out) {
  json j;
  j["dir_a"] = dir_a;
  j["dir_b"] = dir_b;
  double worst_invariant = 0.0;

  // invariant columns: aligned-time unit-floored deviations
  Csv ia, ib;
  try {
    ia = read_csv(dir_a + "/trace_invariants.csv");
    ib = read_csv(dir_b + "/trace_invariants.csv");
  } catch (const ConfigError&) {
    // gauge-transfer runs name their traces differently
    ia = read_csv(dir_a + "/deturck_invariants.csv");
    ib = read_csv(dir_b + "/deturck_invariants.csv");
  }
  if (ia.header != ib.header)
    throw ConfigError("invariant columns are incompatible");
  const std::size_t rows = std::min(ia.rows.size(), ib.rows.size());
  if (rows == 0) throw ConfigError("no rows to compare");
  json devs;
  for (std::size_t c = 1; c < ia.header.size(); ++c) {
    double d = 0.0;
    std::size_t aligned = 0;
    for (std::size_t r = 0; r < rows; ++r) {
      if (std::abs(ia.rows[r][0] - ib.rows[r][0]) > 1e-9) continue;
      ++aligned;
      d = std::max(d, unit_floor_dev(ia.rows[r][c], ib.rows[r][c]));
    }
    if (aligned == 0) throw ConfigError("time bases are incompatible");
    devs[ia.header[c]] = d;
    worst_invariant = std::max(worst_invariant, d);
  }
  j["invariant_max_dev"] = devs;

  // distance columns from the main trace: ratio statistics
  try {
    Csv ta = read_csv(dir_a + "/trace.csv");
    Csv tb = read_csv(dir_b + "/trace.csv");
    json ratios;
    for (const char* col : {"l2_dist", "sup_dist"}) {
      std::size_t ci = 0;
      for (; ci < ta.header.size(); ++ci)
        if (ta.header[ci] == col) break;
      if (ci == ta.header.size()) continue;
      std::vector<double> rr;
      for (std::size_t r = 0; r < std::min(ta.rows.size(), tb.rows.size());
           ++r) {
        if (std::abs(ta.rows[r][0] - tb.rows[r][0]) > 1e-9) continue;
        if (ta.rows[r][ci] > 1e-14 && tb.rows[r][ci] > 1e-14)
          rr.push_back(ta.rows[r][ci] / tb.rows[r][ci]);
      }
      if (rr.empty()) continue;
      std::sort(rr.begin(), rr.end());
      ratios[col] = {{"median", rr[rr.size() / 2]},
                     {"min", rr.front()},
                     {"max", rr.back()}};
    }
    j["distance_ratios"] = ratios;
  } catch (const ConfigError&) {
    // runs without a plain trace.csv (fine for comparisons of invariants)
  }

  j["max_invariant_dev"] = worst_invariant;
  const bool gated = max_dev >= 0.0;
  const bool pass = !gated || worst_invariant <= max_dev;
  j["pass"] = pass;
  const std::string text = j.dump(2);
  std::printf("%s\n", text.c_str());
  if (report_out) *report_out = text;
  return pass ? kOk : kAssertionFailed;
}

}  // namespace rsl::lab
