#include "rsl/flow.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "rsl/curvature.hpp"
#include "rsl/fd.hpp"
#include "rsl/inner.hpp"
#include "rsl/lambda.hpp"
#include "rsl/operators.hpp"

namespace rsl {

const char* to_string(FlowKind k) {
  return k == FlowKind::Ricci ? "ricci" : "deturck";
}

double cfl_dt(const MetricField& g, double dt_safety) {
  const GridSpec& grid = g.grid();
  double dx2 = grid.spacing(0) * grid.spacing(0);
  for (int a = 1; a < grid.dim; ++a)
    dx2 = std::min(dx2, grid.spacing(a) * grid.spacing(a));
  return dt_safety * dx2 / (2.0 * grid.dim * g.sup_inverse_norm());
}

namespace {

// flow right-hand side; chris_g0 may be null for the Ricci flow or constant g0
SymTensorField flow_rhs(const MetricField& g, const FlowConfig& cfg,
                        const MetricField* g0,
                        const ChristoffelField* chris_g0) {
  RicciPack pack = ricci_of(g);
  SymTensorField rhs = pack.ricci;
  rhs.scale(-2.0);
  if (cfg.kind == FlowKind::DeTurck) {
    if (!g0) throw std::invalid_argument("DeTurck flow needs a background");
    if (chris_g0) {
      rhs.add_scaled(1.0, deturck_correction(g, *g0, pack, *chris_g0));
    } else {
      ChristoffelField zero(g.grid());
      if (g0->is_constant()) {
        rhs.add_scaled(1.0, deturck_correction(g, *g0, pack, zero));
      } else {
        RicciPack pack0 = ricci_of(*g0);
        rhs.add_scaled(1.0, deturck_correction(g, *g0, pack, pack0.christoffel));
      }
    }
  }
  return rhs;
}

MetricField rk4_step(const MetricField& g, const FlowConfig& cfg, double dt,
                     const MetricField* g0, const ChristoffelField* chris_g0) {
  auto admissible = [&](const SymTensorField& t) {
    return MetricField::from_tensor(t, cfg.positivity_floor);
  };

  SymTensorField k1 = flow_rhs(g, cfg, g0, chris_g0);

  SymTensorField s2 = g;
  s2.add_scaled(0.5 * dt, k1);
  SymTensorField k2 = flow_rhs(admissible(s2), cfg, g0, chris_g0);

  SymTensorField s3 = g;
  s3.add_scaled(0.5 * dt, k2);
  SymTensorField k3 = flow_rhs(admissible(s3), cfg, g0, chris_g0);

  SymTensorField s4 = g;
  s4.add_scaled(dt, k3);
  SymTensorField k4 = flow_rhs(admissible(s4), cfg, g0, chris_g0);

  SymTensorField next = g;
  next.add_scaled(dt / 6.0, k1);
  next.add_scaled(dt / 3.0, k2);
  next.add_scaled(dt / 3.0, k3);
  next.add_scaled(dt / 6.0, k4);
  if (!std::isfinite(next.sup_norm()))
    throw std::domain_error("flow produced non-finite values");
  return admissible(next);
}

}  // namespace

MetricField flow_step(const MetricField& g, const FlowConfig& cfg,
                      double* dt_used) {
  g.require_admissible(cfg.positivity_floor);
  const double dt = cfl_dt(g, cfg.dt_safety);
  if (dt_used) *dt_used = dt;
  const MetricField* g0 = cfg.background ? &*cfg.background : nullptr;
  return rk4_step(g, cfg, dt, g0, nullptr);
}

std::vector<SymTensorField> flat_kernel_basis(const GridSpec& g) {
  std::vector<SymTensorField> basis;
  for (int c = 0; c < g.sym_components(); ++c) {
    SymTensorField b(g);
    for (std::size_t n = 0; n < g.node_count(); ++n) b.at(n, c) = 1.0;
    basis.push_back(std::move(b));
  }
  return basis;
}

ReferenceUpdateResult reference_update_full(
    const MetricField& g_tilde, const MetricField& g0,
    std::span<const SymTensorField> kernel_basis) {
  const GridSpec& grid = g_tilde.grid();
  if (!grid.compatible_with(g0.grid()))
    throw std::invalid_argument("reference update: incompatible grids");
  auto w0 = volume_weight(g0);
  const std::size_t nodes = grid.node_count();
  const int ncomp = grid.sym_components();

  // dV_{g0}-weighted averages per component
  SymTensorField avg(grid);
  for (int c = 0; c < ncomp; ++c) {
    double s = 0.0;
    for (std::size_t n = 0; n < nodes; ++n) s += w0.dV[n] * g_tilde.at(n, c);
    const double v = s / w0.total;
    for (std::size_t n = 0; n < nodes; ++n) avg.at(n, c) = v;
  }

  ReferenceUpdateResult res{MetricField::from_tensor(avg), 0.0, 0.0};

  SymTensorField diff = g_tilde;
  diff.add_scaled(-1.0, res.g1);
  for (const auto& b : kernel_basis)
    res.projection_sup = std::max(
        res.projection_sup, std::abs(inner_product(diff, b, w0)));

  SymTensorField dev0 = g_tilde;
  dev0.add_scaled(-1.0, g0);
  const double denom = l2_norm(dev0, w0);
  SymTensorField shift = res.g1;
  shift.add_scaled(-1.0, g0);
  res.contraction = denom > 0.0 ? l2_norm(shift, w0) / denom : 0.0;
  return res;
}

MetricField reference_update(const MetricField& g_tilde, const MetricField& g0,
                             std::span<const SymTensorField> kernel_basis) {
  return reference_update_full(g_tilde, g0, kernel_basis).g1;
}

FlowTrace evolve(const MetricField& g_init, const FlowConfig& cfg) {
  FlowTrace trace;
  if (cfg.reference_updates && !(cfg.reference_update_period > 0.0))
    throw std::invalid_argument(
        "reference updates need a positive update period");
  g_init.require_admissible(cfg.positivity_floor);
  MetricField g = g_init;
  MetricField g0 = cfg.background ? *cfg.background : g_init;
  auto w0 = volume_weight(g0);
  const bool g0_constant = g0.is_constant();
  ChristoffelField chris_g0(g.grid());  // zero for constant g0
  if (!g0_constant) {
    RicciPack pack0 = ricci_of(g0);
    chris_g0 = std::move(pack0.christoffel);
  }
  auto kernel = flat_kernel_basis(g.grid());

  MetricField g_ref = g0;
  int ref_index = 0;

  ScalarField lambda_warm(g.grid(), 1.0);
  bool have_warm = false;

  auto sample_now = [&](double t) {
    FlowSample s;
    s.t = t;
    if (cfg.record_lambda) {
      LambdaSettings ls;
      ls.tol = cfg.lambda_tol;
      LambdaResult lam =
          lambda_of(g, ls, have_warm ? &lambda_warm : nullptr);
      s.lambda = lam.value;
      lambda_warm = lam.ground_state;
      have_warm = true;
    }
    SymTensorField diff = g;
    diff.add_scaled(-1.0, g_ref);
    s.l2_dist = l2_norm(diff, w0);
    s.sup_dist = diff.sup_norm();
    s.ref_index = ref_index;

    RicciPack pack = ricci_of(g);
    auto wg = volume_weight(g);
    s.vol = wg.total;
    s.ricci_l2 = std::sqrt(inner_product(pack.ricci, pack.ricci, wg));
    s.scalar_l2 = std::sqrt(inner_product(pack.scalar, pack.scalar, wg));
    trace.samples.push_back(std::move(s));
  };

  const double tiny = 1e-12;
  double t = 0.0;
  sample_now(t);

  double next_record = cfg.record_dt > 0.0 ? cfg.record_dt : 0.0;
  double next_update = cfg.reference_updates && cfg.reference_update_period > 0.0
                           ? cfg.reference_update_period
                           : std::numeric_limits<double>::infinity();
  long step = 0;

  const MetricField* bg = cfg.background ? &*cfg.background : nullptr;

  while (t < cfg.t_end - tiny) {
    double dt = cfl_dt(g, cfg.dt_safety);
    dt = std::min(dt, cfg.t_end - t);
    if (cfg.record_dt > 0.0) dt = std::min(dt, next_record - t);
    if (std::isfinite(next_update)) dt = std::min(dt, next_update - t);
    if (!(dt > 0.0)) break;

    try {
      g = rk4_step(g, cfg, dt, bg, bg && g0_constant ? &chris_g0 : nullptr);
    } catch (const std::domain_error&) {
      trace.failure_reason = "left neighbourhood";
      trace.failure_time = t;
      trace.final_time = t;
      trace.final_metric = g;
      return trace;
    }
    t += dt;
    ++step;

    if (std::isfinite(next_update) && t >= next_update - tiny) {
      try {
        auto upd = reference_update_full(g, g0, kernel);
        g_ref = upd.g1;
        ++ref_index;
        trace.reference_times.push_back(t);
        trace.reference_metrics.push_back(g_ref);
      } catch (const std::domain_error&) {
        trace.failure_reason = "reference update left the admissible cone";
        trace.failure_time = t;
        trace.final_time = t;
        trace.final_metric = g;
        return trace;
      }
      next_update += cfg.reference_update_period;
    }

    bool record = false;
    if (cfg.record_dt > 0.0) {
      if (t >= next_record - tiny) {
        record = true;
        next_record += cfg.record_dt;
      }
    } else {
      record = (step % std::max(1, cfg.record_every) == 0);
    }
    if (record || t >= cfg.t_end - tiny) sample_now(t);
  }

  trace.completed = true;
  trace.final_time = t;
  trace.final_metric = g;
  return trace;
}

RemainderCheck remainder_check(const MetricField& g_tilde,
                               const MetricField& g0) {
  const GridSpec& grid = g_tilde.grid();
  if (!grid.compatible_with(g0.grid()))
    throw std::invalid_argument("remainder check: incompatible grids");

  FlowConfig cfg;
  cfg.kind = FlowKind::DeTurck;
  SymTensorField h = g_tilde;
  h.add_scaled(-1.0, g0);

  RicciPack pack = ricci_of(g_tilde);
  SymTensorField rhs = pack.ricci;
  rhs.scale(-2.0);
  ChristoffelField chris0(grid);
  if (!g0.is_constant()) {
    RicciPack pack0 = ricci_of(g0);
    chris0 = std::move(pack0.christoffel);
  }
  rhs.add_scaled(1.0, deturck_correction(g_tilde, g0, pack, chris0));

  SymTensorField F = rhs;
  F.add_scaled(-1.0, lichnerowicz_apply(h, g0));

  RemainderCheck out;
  out.norm_F = F.sup_norm();

  const int dim = grid.dim;
  double d1 = 0.0, d2 = 0.0;
  for (int a = 0; a < dim; ++a) {
    d1 = std::max(d1, partial_derivative(h, a, 1).sup_norm());
    for (int b = a; b < dim; ++b) {
      SymTensorField dd = (a == b)
                              ? partial_derivative(h, a, 2)
                              : partial_derivative(partial_derivative(h, a, 1),
                                                   b, 1);
      d2 = std::max(d2, dd.sup_norm());
    }
  }
  out.bound = h.sup_norm() * d2 + d1 * d1;
  out.ratio = out.bound > 0.0 ? out.norm_F / out.bound : 0.0;
  return out;
}

DecayFit fit_log_slope(std::span<const double> t, std::span<const double> d) {
  if (t.size() != d.size() || t.size() < 10)
    throw std::invalid_argument("decay fit window too short (< 10 samples)");
  const std::size_t n = t.size();
  double st = 0.0, sy = 0.0;
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(d[i] > 0.0))
      throw std::invalid_argument("decay fit needs positive distances");
    y[i] = std::log(d[i]);
    st += t[i];
    sy += y[i];
  }
  const double tbar = st / n, ybar = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (t[i] - tbar) * (t[i] - tbar);
    sxy += (t[i] - tbar) * (y[i] - ybar);
  }
  if (sxx == 0.0) throw std::invalid_argument("decay fit needs a time spread");
  const double slope = sxy / sxx;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - ybar - slope * (t[i] - tbar);
    rss += r * r;
  }
  DecayFit fit;
  fit.rate = -slope;
  fit.residual = std::sqrt(rss / n);
  fit.samples = static_cast<int>(n);
  return fit;
}

DecayFit fit_decay_rate(const FlowTrace& trace, double t0, double t1) {
  std::vector<double> t, d;
  for (const auto& s : trace.samples)
    if (s.t >= t0 && s.t <= t1 && s.l2_dist > 0.0) {
      t.push_back(s.t);
      d.push_back(s.l2_dist);
    }
  return fit_log_slope(t, d);
}

namespace {
double unit_floor_dev(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}
}  // namespace

GaugeTransferReport gauge_transfer_check(const FlowTrace& trace_deturck,
                                         const MetricField& g_init,
                                         const FlowConfig& deturck_cfg,
                                         double fit_t0, double fit_t1,
                                         double invariant_tol,
                                         double rate_tol) {
  FlowConfig rc = deturck_cfg;
  rc.kind = FlowKind::Ricci;
  rc.reference_updates = false;
  GaugeTransferReport rep;
  rep.ricci_trace = evolve(g_init, rc);
  if (!rep.ricci_trace.completed || !trace_deturck.completed) return rep;

  const std::size_t n =
      std::min(rep.ricci_trace.samples.size(), trace_deturck.samples.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = trace_deturck.samples[i];
    const auto& b = rep.ricci_trace.samples[i];
    if (std::abs(a.t - b.t) > 1e-9)
      continue;  // time bases must match; skip unaligned tails
    rep.max_lambda_dev = std::max(rep.max_lambda_dev,
                                  unit_floor_dev(a.lambda, b.lambda));
    rep.max_vol_dev = std::max(rep.max_vol_dev, unit_floor_dev(a.vol, b.vol));
    rep.max_scalar_dev = std::max(rep.max_scalar_dev,
                                  unit_floor_dev(a.scalar_l2, b.scalar_l2));
  }

  auto rate_of = [&](const FlowTrace& tr) {
    std::vector<double> t, d;
    for (const auto& s : tr.samples)
      if (s.t >= fit_t0 && s.t <= fit_t1 && s.ricci_l2 > 0.0) {
        t.push_back(s.t);
        d.push_back(s.ricci_l2);
      }
    return fit_log_slope(t, d).rate;
  };
  rep.rate_deturck = rate_of(trace_deturck);
  rep.rate_ricci = rate_of(rep.ricci_trace);
  rep.rate_rel_dev = std::abs(rep.rate_deturck - rep.rate_ricci) /
                     std::max(std::abs(rep.rate_deturck), 1e-30);

  rep.ok = rep.max_lambda_dev <= invariant_tol &&
           rep.max_vol_dev <= invariant_tol && rep.rate_rel_dev <= rate_tol;
  return rep;
}

}  // namespace rsl
