#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "rsl/flow.hpp"
#include "rsl/inner.hpp"
#include "rsl/operators.hpp"
#include "rsl/presets.hpp"
#include "rsl/rand_field.hpp"

using namespace rsl;

namespace {

const double kTwoPi = 2.0 * M_PI;

MetricField perturbed_flat(const GridSpec& g, std::uint64_t seed, double amp,
                           int band = 2) {
  SymTensorField t = MetricField::identity(g);
  t.add_scaled(1.0, band_limited_perturbation(g, seed, band, amp));
  return MetricField::from_tensor(t);
}

}  // namespace

TEST_CASE("constant metrics are stationary for both flows") {
  auto g = GridSpec::torus(2, 16, kTwoPi, DiffScheme::Spectral);
  SymMat m;
  m.dim = 2;
  m(0, 0) = 1.2;
  m(1, 1) = 0.9;
  m(0, 1) = 0.1;
  MetricField metric = MetricField::constant(g, m);

  for (FlowKind kind : {FlowKind::Ricci, FlowKind::DeTurck}) {
    FlowConfig cfg;
    cfg.kind = kind;
    cfg.background = MetricField::identity(g);
    MetricField next = flow_step(metric, cfg);
    SymTensorField dev = next;
    dev.add_scaled(-1.0, metric);
    CHECK(dev.sup_norm() <= 1e-13);
  }
}

TEST_CASE("pure gauge perturbations decay under the DeTurck flow") {
  auto g = GridSpec::torus(2, 16, kTwoPi, DiffScheme::Spectral);
  MetricField id = MetricField::identity(g);
  MetricField sheared = shear_metric(g, 0.02);

  FlowConfig cfg;
  cfg.kind = FlowKind::DeTurck;
  cfg.background = id;
  cfg.t_end = 4.0;
  cfg.record_dt = 0.1;
  cfg.record_lambda = false;
  FlowTrace trace = evolve(sheared, cfg);
  REQUIRE(trace.completed);
  const double d0 = trace.samples.front().l2_dist;
  const double d1 = trace.samples.back().l2_dist;
  CHECK(d1 < 0.05 * d0);
  // monotone decay after the transient
  for (std::size_t i = 3; i + 1 < trace.samples.size(); ++i)
    CHECK(trace.samples[i + 1].l2_dist <=
          trace.samples[i].l2_dist * (1.0 + 1e-9));
}

TEST_CASE("lambda is nondecreasing along the Ricci flow") {
  auto g = GridSpec::torus(2, 16, kTwoPi, DiffScheme::Spectral);
  MetricField start = perturbed_flat(g, 71, 1e-2);
  FlowConfig cfg;
  cfg.kind = FlowKind::Ricci;
  cfg.background = MetricField::identity(g);
  cfg.t_end = 1.5;
  cfg.record_dt = 0.05;
  FlowTrace trace = evolve(start, cfg);
  REQUIRE(trace.completed);
  for (std::size_t i = 0; i + 1 < trace.samples.size(); ++i) {
    const double slack =
        1e-8 * (1.0 + std::abs(trace.samples[i].lambda));
    CHECK(trace.samples[i + 1].lambda >= trace.samples[i].lambda - slack);
  }
  CHECK(trace.samples.front().lambda < 0.0);
}

TEST_CASE("single cosine mode decays at the lowest Lichnerowicz rate") {
  auto g = GridSpec::torus(2, 16, kTwoPi, DiffScheme::Spectral);
  MetricField id = MetricField::identity(g);
  SymTensorField t = id;
  for (std::size_t n = 0; n < g.node_count(); ++n) {
    const double c = 1e-3 * std::cos(g.coord(0, g.node_coords(n)[0]));
    t.at(n, 0, 0) += 0.3 * c;
    t.at(n, 0, 1) += 0.5 * c;
    t.at(n, 1, 1) += -0.2 * c;
  }
  FlowConfig cfg;
  cfg.kind = FlowKind::DeTurck;
  cfg.background = id;
  cfg.t_end = 4.0;
  cfg.record_dt = 0.05;
  cfg.record_lambda = false;
  FlowTrace trace = evolve(MetricField::from_tensor(t), cfg);
  REQUIRE(trace.completed);
  DecayFit fit = fit_decay_rate(trace, 0.5, 3.5);
  CHECK(fit.rate == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("amplitude continuation: halving the amplitude halves the distance") {
  auto g = GridSpec::torus(2, 16, kTwoPi, DiffScheme::Spectral);
  MetricField id = MetricField::identity(g);
  FlowConfig cfg;
  cfg.kind = FlowKind::DeTurck;
  cfg.background = id;
  cfg.t_end = 1.0;
  cfg.record_dt = 0.1;
  cfg.record_lambda = false;

  FlowTrace a = evolve(perturbed_flat(g, 99, 1e-2), cfg);
  FlowTrace b = evolve(perturbed_flat(g, 99, 5e-3), cfg);
  REQUIRE(a.completed);
  REQUIRE(b.completed);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    if (a.samples[i].sup_dist < 1e-12) continue;
    const double ratio = a.samples[i].sup_dist / b.samples[i].sup_dist;
    CHECK(ratio == doctest::Approx(2.0).epsilon(0.10));
  }
}

TEST_CASE("reference update: averages, exactness on kernel shifts") {
  auto g = GridSpec::torus(2, 16, kTwoPi, DiffScheme::Spectral);
  MetricField id = MetricField::identity(g);
  auto kernel = flat_kernel_basis(g);

  // zero-mean perturbation: g1 == g0 exactly
  MetricField gt = perturbed_flat(g, 5, 1e-3);
  auto upd = reference_update_full(gt, id, kernel);
  SymTensorField dev = upd.g1;
  dev.add_scaled(-1.0, id);
  CHECK(dev.sup_norm() <= 1e-13);

  // constant shift: g1 == g0 + c exactly, psi is the identity on the kernel
  SymTensorField shifted = id;
  for (std::size_t n = 0; n < g.node_count(); ++n) {
    shifted.at(n, 0, 0) += 0.05;
    shifted.at(n, 0, 1) += 0.02;
  }
  auto upd2 = reference_update_full(MetricField::from_tensor(shifted), id, kernel);
  CHECK(upd2.g1.at(0, 0, 0) == doctest::Approx(1.05).epsilon(1e-14));
  CHECK(upd2.g1.at(0, 0, 1) == doctest::Approx(0.02).epsilon(1e-14));
  CHECK(upd2.projection_sup <= 1e-12);
  CHECK(upd2.contraction <= 1.0 + 1e-12);
}

TEST_CASE("kernel killing along a flow: zero modes projected out, decay resumes") {
  auto g = GridSpec::torus(2, 16, kTwoPi, DiffScheme::Spectral);
  MetricField id = MetricField::identity(g);

  // initial data with a surviving zero mode plus decaying content
  SymTensorField t = id;
  for (std::size_t n = 0; n < g.node_count(); ++n) {
    t.at(n, 0, 0) += 0.01;  // constant (kernel) part
    t.at(n, 0, 1) += 5e-3 * std::cos(g.coord(0, g.node_coords(n)[0]));
  }
  FlowConfig cfg;
  cfg.kind = FlowKind::DeTurck;
  cfg.background = id;
  cfg.t_end = 4.0;
  cfg.record_dt = 0.1;
  cfg.record_lambda = false;
  cfg.reference_updates = true;
  cfg.reference_update_period = 2.0;
  FlowTrace trace = evolve(MetricField::from_tensor(t), cfg);
  REQUIRE(trace.completed);
  REQUIRE(!trace.reference_metrics.empty());

  // post-update projections vanish
  auto kernel = flat_kernel_basis(g);
  auto w0 = volume_weight(id);
  REQUIRE(trace.final_metric.has_value());
  auto upd = reference_update_full(*trace.final_metric, id, kernel);
  CHECK(upd.projection_sup <= 1e-12);

  // distance to g0 plateaus at the kernel size; distance to g1 keeps decaying
  const auto& last = trace.samples.back();
  CHECK(last.ref_index >= 1);
  CHECK(last.l2_dist < 1e-3);  // would plateau near 0.01 * sqrt(Vol) without updates

  // strict decay inside update intervals
  for (std::size_t i = 1; i + 1 < trace.samples.size(); ++i) {
    if (trace.samples[i + 1].ref_index != trace.samples[i].ref_index) continue;
    CHECK(trace.samples[i + 1].l2_dist <=
          trace.samples[i].l2_dist * (1.0 + 1e-9) + 1e-15);
  }

  // recorded references are stationary solutions: constant, Ricci-flat, with
  // a vanishing DeTurck term, and Cauchy in sup norm
  for (std::size_t i = 0; i < trace.reference_metrics.size(); ++i) {
    const MetricField& ref = trace.reference_metrics[i];
    CHECK(ref.is_constant());
    CHECK(ricci_of(ref).ricci.sup_norm() <= 1e-12);
    CHECK(deturck_correction(ref, id).sup_norm() <= 1e-12);
  }
  for (std::size_t i = 1; i + 1 < trace.reference_metrics.size(); ++i) {
    SymTensorField d1 = trace.reference_metrics[i];
    d1.add_scaled(-1.0, trace.reference_metrics[i - 1]);
    SymTensorField d2 = trace.reference_metrics[i + 1];
    d2.add_scaled(-1.0, trace.reference_metrics[i]);
    CHECK(d2.sup_norm() <= d1.sup_norm() * (1.0 + 1e-9));
  }
}

TEST_CASE("reference updates with a non-positive period are rejected") {
  auto g = GridSpec::torus(2, 16, kTwoPi, DiffScheme::Spectral);
  MetricField id = MetricField::identity(g);
  FlowConfig cfg;
  cfg.kind = FlowKind::DeTurck;
  cfg.background = id;
  cfg.reference_updates = true;
  cfg.reference_update_period = 0.0;
  CHECK_THROWS_AS(evolve(id, cfg), std::invalid_argument);
}

TEST_CASE("remainder vanishes at the reference and scales quadratically") {
  auto g = GridSpec::torus(2, 16, kTwoPi, DiffScheme::Spectral);
  MetricField id = MetricField::identity(g);
  CHECK(remainder_check(id, id).norm_F <= 1e-14);

  SymTensorField h = band_limited_perturbation(g, 13, 2, 1.0);
  std::vector<double> ss{1e-2, 1e-3, 1e-4}, logF;
  for (double s : ss) {
    SymTensorField t = id;
    t.add_scaled(s, h);
    RemainderCheck rc = remainder_check(MetricField::from_tensor(t), id);
    CHECK(rc.norm_F > 0.0);
    logF.push_back(std::log(rc.norm_F));
  }
  // log-log slope across the decades
  const double slope01 = (logF[0] - logF[1]) / std::log(10.0);
  const double slope12 = (logF[1] - logF[2]) / std::log(10.0);
  CHECK(slope01 == doctest::Approx(2.0).epsilon(0.05));
  CHECK(slope12 == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("remainder ratio stays bounded over a randomized suite") {
  auto g = GridSpec::torus(2, 16, kTwoPi, DiffScheme::Spectral);
  MetricField id = MetricField::identity(g);
  double max_ratio = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SymTensorField t = id;
    t.add_scaled(1.0, band_limited_perturbation(g, seed, 2, 1e-2));
    RemainderCheck rc = remainder_check(MetricField::from_tensor(t), id);
    max_ratio = std::max(max_ratio, rc.ratio);
  }
  CHECK(max_ratio > 0.0);
  CHECK(max_ratio < 10.0);  // frozen regression bound
}

TEST_CASE("decay fit recovers the exact rate of synthetic data") {
  std::vector<double> t, d;
  for (int i = 0; i < 50; ++i) {
    t.push_back(0.1 * i);
    d.push_back(std::exp(-0.1 * i));
  }
  DecayFit fit = fit_log_slope(t, d);
  CHECK(fit.rate == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(fit.residual <= 1e-12);

  std::vector<double> tshort(t.begin(), t.begin() + 5),
      dshort(d.begin(), d.begin() + 5);
  CHECK_THROWS_AS(fit_log_slope(tshort, dshort), std::invalid_argument);
}

TEST_CASE("runs that leave the admissible cone report it, not crash") {
  // dt_safety = 1 sits outside the RK4 stability region of the top spectral
  // modes, so band-edge content amplifies step by step until positivity goes
  auto g = GridSpec::torus(2, 16, kTwoPi, DiffScheme::Spectral);
  MetricField id = MetricField::identity(g);
  SymTensorField t = id;
  t.add_scaled(1.0, band_limited_perturbation(g, 3, 7, 0.2));
  MetricField start = MetricField::from_tensor(t);
  FlowConfig cfg;
  cfg.kind = FlowKind::DeTurck;
  cfg.background = id;
  cfg.dt_safety = 1.0;
  cfg.t_end = 20.0;
  cfg.record_dt = 0.5;
  cfg.record_lambda = false;
  FlowTrace trace = evolve(start, cfg);
  REQUIRE(!trace.completed);
  CHECK(trace.failure_reason == "left neighbourhood");
  CHECK(trace.failure_time >= 0.0);
  CHECK(trace.final_time < cfg.t_end);
}

TEST_CASE("gauge transfer: invariants and Ricci-norm rates match across flows") {
  auto g = GridSpec::torus(2, 16, kTwoPi, DiffScheme::Spectral);
  MetricField id = MetricField::identity(g);
  MetricField start = perturbed_flat(g, 41, 1e-3);

  FlowConfig cfg;
  cfg.kind = FlowKind::DeTurck;
  cfg.background = id;
  cfg.t_end = 3.0;
  cfg.record_dt = 0.1;
  FlowTrace dt_trace = evolve(start, cfg);
  REQUIRE(dt_trace.completed);

  GaugeTransferReport rep =
      gauge_transfer_check(dt_trace, start, cfg, 0.5, 2.5);
  REQUIRE(rep.ricci_trace.completed);
  CHECK(rep.max_lambda_dev <= 1e-6);
  CHECK(rep.max_vol_dev <= 1e-6);
  CHECK(rep.rate_rel_dev <= 0.10);
  CHECK(rep.ok);
}
