#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rsl/field.hpp"

namespace rsl {

enum class FlowKind { Ricci, DeTurck };
const char* to_string(FlowKind k);

struct FlowConfig {
  FlowKind kind = FlowKind::DeTurck;
  /// Reference metric g0: the DeTurck background, the weight dV_{g0} for
  /// distances, and the seed of the reference-metric sequence.  When absent,
  /// the initial metric is used.
  std::optional<MetricField> background;
  double dt_safety = 0.5;  // c in dt = c min(dx^2) / (2 n sup|g^-1|)
  double t_end = 1.0;
  int record_every = 10;    // sample every k steps (used when record_dt <= 0)
  double record_dt = 0.0;   // > 0: sample at multiples, steps land exactly
  bool reference_updates = false;
  double reference_update_period = 0.0;  // interval length A
  bool record_lambda = true;
  double lambda_tol = 1e-11;
  double positivity_floor = MetricField::kPositivityFloor;
};

struct FlowSample {
  double t = 0.0;
  double lambda = 0.0;
  double l2_dist = 0.0;   // |g - g_ref| in L2(dV_{g0})
  double sup_dist = 0.0;
  int ref_index = 0;
  // diffeomorphism-invariant diagnostics (second CSV / gauge transfer)
  double vol = 0.0;
  double ricci_l2 = 0.0;   // sqrt(int |Ric|_g^2 dV_g)
  double scalar_l2 = 0.0;  // sqrt(int R^2 dV_g)
};

struct FlowTrace {
  std::vector<FlowSample> samples;
  std::vector<double> reference_times;
  std::vector<MetricField> reference_metrics;
  bool completed = false;
  std::string failure_reason;
  double failure_time = 0.0;
  double final_time = 0.0;
  std::optional<MetricField> final_metric;
  std::optional<double> fitted_decay_rate;
  double fit_residual = 0.0;
};

/// Parabolic CFL step size, recomputed from the current metric.
double cfl_dt(const MetricField& g, double dt_safety);

/// One explicit RK4 step of the chosen flow.  Throws std::domain_error when
/// a stage leaves the admissible cone (positivity floor) or produces
/// non-finite values.  dt_used reports the step actually taken.
MetricField flow_step(const MetricField& g, const FlowConfig& cfg,
                      double* dt_used = nullptr);

/// Integrate to t_end, recording diagnostics and (optionally) performing the
/// kernel-killing reference update every reference_update_period time units.
/// On admissibility failure the trace is returned up to the failure time with
/// failure_reason = "left neighbourhood".
FlowTrace evolve(const MetricField& g_init, const FlowConfig& cfg);

struct ReferenceUpdateResult {
  MetricField g1;
  double projection_sup = 0.0;  // max |<g~ - g1, B>| over the kernel basis
  double contraction = 0.0;     // |g1 - g0| / |g~ - g0| in L2(dV_{g0})
};

/// Kernel-killing update: the constant metric whose entries are dV_{g0}
/// averages of g~ (the psi-inverse of the zero-mode projection).  Throws
/// std::domain_error when the averaged metric is not positive definite.
ReferenceUpdateResult reference_update_full(
    const MetricField& g_tilde, const MetricField& g0,
    std::span<const SymTensorField> kernel_basis);
MetricField reference_update(const MetricField& g_tilde, const MetricField& g0,
                             std::span<const SymTensorField> kernel_basis);

/// The n(n+1)/2 constant symmetric tensors: ker Delta_L on the flat torus.
std::vector<SymTensorField> flat_kernel_basis(const GridSpec& g);

struct RemainderCheck {
  double norm_F = 0.0;   // sup norm of RHS(g~) - Delta_L(g~ - g0)
  double bound = 0.0;    // |h| |d2h| + |dh|^2 in sup norms
  double ratio = 0.0;
};

/// Nonlinear remainder of the DeTurck flow around g0.
RemainderCheck remainder_check(const MetricField& g_tilde,
                               const MetricField& g0);

struct DecayFit {
  double rate = 0.0;      // decay exponent (positive = decaying)
  double residual = 0.0;  // rms residual of the log-linear fit
  int samples = 0;
};

/// Least-squares slope of log(distance) vs time over [t0, t1]; throws
/// std::invalid_argument when fewer than 10 positive samples fall inside.
DecayFit fit_decay_rate(const FlowTrace& trace, double t0, double t1);
DecayFit fit_log_slope(std::span<const double> t, std::span<const double> d);

struct GaugeTransferReport {
  bool ok = false;
  double max_lambda_dev = 0.0;   // unit-floored relative deviation
  double max_vol_dev = 0.0;
  double max_scalar_dev = 0.0;
  double rate_deturck = 0.0;     // |Ric| decay exponents
  double rate_ricci = 0.0;
  double rate_rel_dev = 0.0;
  FlowTrace ricci_trace;
};

/// Run the plain Ricci flow from the same initial data and compare
/// diffeomorphism-invariant scalars at matched sample times, plus the |Ric|
/// decay rates over the given fit window.
GaugeTransferReport gauge_transfer_check(const FlowTrace& trace_deturck,
                                         const MetricField& g_init,
                                         const FlowConfig& deturck_cfg,
                                         double fit_t0, double fit_t1,
                                         double invariant_tol = 1e-6,
                                         double rate_tol = 0.10);

}  // namespace rsl
