#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "rsl/inner.hpp"
#include "rsl/rand_field.hpp"

using namespace rsl;

TEST_CASE("constant function on the unit-volume torus has <f,f> = 1") {
  auto g = GridSpec::torus(2, 16, 1.0);
  MetricField id = MetricField::identity(g);
  auto w = volume_weight(id);
  CHECK(w.total == doctest::Approx(1.0));
  ScalarField f(g, 1.0);
  CHECK(inner_product(f, f, w) == doctest::Approx(1.0));
}

TEST_CASE("sin and cos of the same mode are orthogonal in quadrature") {
  auto g = GridSpec::torus(2, 32, 2.0 * M_PI);
  MetricField id = MetricField::identity(g);
  auto w = volume_weight(id);
  ScalarField s(g), c(g);
  for (std::size_t n = 0; n < g.node_count(); ++n) {
    const double x = g.coord(0, g.node_coords(n)[0]);
    s[n] = std::sin(x);
    c[n] = std::cos(x);
  }
  CHECK(std::abs(inner_product(s, c, w)) < 1e-12);
}

TEST_CASE("inner product is symmetric exactly and positive definite") {
  auto g = GridSpec::torus(2, 16, 2.0 * M_PI);
  MetricField id = MetricField::identity(g);
  auto w = volume_weight(id);
  auto a = band_limited_perturbation(g, 11, 2, 0.3);
  auto b = band_limited_perturbation(g, 12, 2, 0.7);
  CHECK(inner_product(a, b, w) == inner_product(b, a, w));
  CHECK(inner_product(a, a, w) > 0.0);

  auto x = band_limited_vector(g, 4, 2, 0.5);
  auto y = band_limited_vector(g, 5, 2, 0.5);
  CHECK(inner_product(x, y, w) == inner_product(y, x, w));
  CHECK(inner_product(x, x, w) > 0.0);
}

TEST_CASE("weight totals equal the metric volume") {
  auto g = GridSpec::torus(2, 16, 2.0 * M_PI);
  SymMat m;
  m.dim = 2;
  m(0, 0) = 4.0;
  m(1, 1) = 1.0;
  MetricField metric = MetricField::constant(g, m);
  auto w = volume_weight(metric);
  // vol = sqrt(det g) * L^2 = 2 * (2pi)^2
  CHECK(w.total == doctest::Approx(2.0 * std::pow(2.0 * M_PI, 2)));
  for (std::size_t n = 0; n < g.node_count(); ++n) CHECK(w.dV[n] > 0.0);
}

TEST_CASE("rank and grid mismatches are rejected") {
  auto g = GridSpec::torus(2, 16, 1.0);
  auto g2 = GridSpec::torus(2, 8, 1.0);
  MetricField id = MetricField::identity(g);
  auto w = volume_weight(id);
  ScalarField f(g);
  ScalarField f2(g2);
  CHECK_THROWS_AS(inner_product(f, f2, w), std::invalid_argument);
}
