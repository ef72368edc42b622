#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "rsl/inner.hpp"
#include "rsl/lambda.hpp"
#include "rsl/operators.hpp"
#include "rsl/presets.hpp"
#include "rsl/rand_field.hpp"
#include "rsl/second_variation.hpp"

using namespace rsl;

namespace {

const double kTwoPi = 2.0 * M_PI;

// 5-point central second derivative of lambda(g0 + s h) at s = 0
double lambda_d2_fd(const MetricField& g0, const SymTensorField& h, double s) {
  auto lam = [&](double a) {
    SymTensorField t = g0;
    t.add_scaled(a, h);
    LambdaResult r = lambda_of(MetricField::from_tensor(t));
    REQUIRE(r.converged);
    return r.value;
  };
  const double l0 = lam(0.0);
  return (-lam(2 * s) + 16.0 * lam(s) - 30.0 * l0 + 16.0 * lam(-s) -
          lam(-2 * s)) /
         (12.0 * s * s);
}

}  // namespace

TEST_CASE("pure gauge and scale directions are null directions of L") {
  auto g = GridSpec::torus(2, 16, kTwoPi, DiffScheme::Spectral);
  MetricField id = MetricField::identity(g);
  auto w = volume_weight(id);

  for (std::uint64_t seed : {10, 11, 12}) {
    VectorField X = band_limited_vector(g, seed, 2, 0.1);
    SymTensorField h = div_adjoint(X, id);
    auto sv = second_variation_L(h, id);
    REQUIRE(sv.converged);
    const double h2 = inner_product(h, h, w);
    CHECK(std::abs(sv.quad) <= 1e-10 * h2);
  }

  SymTensorField hg = id;
  hg.scale(0.7);
  auto sv = second_variation_L(hg, id);
  REQUIRE(sv.converged);
  CHECK(std::abs(sv.quad) <= 1e-10 * inner_product(hg, hg, w));
}

TEST_CASE("TT single mode: <Lh,h> = (1/2) <Lap h, h> with the Fourier value") {
  // T^3 side 2pi, h supported on wavevector (1,0,0) with only the (2,3)
  // component: TT, so Lh = (1/2) Delta_L h and <Lh,h> = -(1/2) |h|^2
  auto g = GridSpec::torus(3, 8, kTwoPi, DiffScheme::Spectral);
  MetricField id = MetricField::identity(g);
  auto w = volume_weight(id);
  SymTensorField h(g);
  const double m = 0.3;
  for (std::size_t n = 0; n < g.node_count(); ++n)
    h.at(n, 1, 2) = m * std::cos(g.coord(0, g.node_coords(n)[0]));

  auto sv = second_variation_L(h, id);
  REQUIRE(sv.converged);
  const double h2 = inner_product(h, h, w);
  // analytic: |h|^2 = 2 m^2 Vol/2 = m^2 Vol; <Lh,h> = -(1/2) h2
  const double vol = std::pow(kTwoPi, 3);
  CHECK(h2 == doctest::Approx(m * m * vol).epsilon(1e-12));
  CHECK(sv.quad == doctest::Approx(-0.5 * h2).epsilon(1e-10));
  CHECK(sv.quad < 0.0);
}

TEST_CASE("operator value matches the 5-point FD of lambda through Vol(g0)") {
  auto g = GridSpec::torus(2, 16, kTwoPi, DiffScheme::Spectral);
  MetricField id = MetricField::identity(g);
  auto w = volume_weight(id);
  for (std::uint64_t seed : {21, 22}) {
    auto h = band_limited_perturbation(g, seed, 2, 0.05);
    auto sv = second_variation_L(h, id);
    REQUIRE(sv.converged);
    const double fd = lambda_d2_fd(id, h, 0.05);
    const double op = sv.quad / w.total;
    CHECK(op == doctest::Approx(fd).epsilon(1e-3));
  }
}

TEST_CASE("non-flat backgrounds are rejected") {
  auto g = GridSpec::torus(2, 16, kTwoPi, DiffScheme::Spectral);
  MetricField curved = conformal_metric(g, 0.2);
  SymTensorField h = band_limited_perturbation(g, 3, 2, 0.1);
  CHECK_THROWS_AS(second_variation_L(h, curved), std::domain_error);
}
