#include "rsl/presets.hpp"

#include <cmath>
#include <stdexcept>

namespace rsl {

MetricField conformal_metric(const GridSpec& g, double amp, int wavenumber,
                             int axis) {
  MetricField m(g);
  const std::size_t nodes = g.node_count();
  for (std::size_t n = 0; n < nodes; ++n) {
    const auto c = g.node_coords(n);
    const double x = g.coord(axis, c[axis]);
    const double phi =
        amp * std::sin(2.0 * M_PI * wavenumber * x / g.side_lengths[axis]);
    const double f = std::exp(2.0 * phi);
    for (int i = 0; i < g.dim; ++i) m.at(n, i, i) = f;
  }
  m.require_admissible();
  return m;
}

MetricField scaled_identity_metric(const GridSpec& g, double amp,
                                   int wavenumber, int axis) {
  if (std::abs(amp) >= 1.0)
    throw std::invalid_argument("scaled identity needs |amp| < 1");
  MetricField m(g);
  const std::size_t nodes = g.node_count();
  for (std::size_t n = 0; n < nodes; ++n) {
    const auto c = g.node_coords(n);
    const double x = g.coord(axis, c[axis]);
    const double f =
        1.0 + amp * std::sin(2.0 * M_PI * wavenumber * x / g.side_lengths[axis]);
    for (int i = 0; i < g.dim; ++i) m.at(n, i, i) = f;
  }
  m.require_admissible();
  return m;
}

MetricField shear_metric(const GridSpec& g, double amp) {
  // phi(x) = (x0 + s(x1), x1, ...), s = amp sin(2 pi x1 / L1);
  // pullback of delta: g = J^T J with J = [[1, s'],[0, 1]] (identity in x2)
  MetricField m(g);
  const std::size_t nodes = g.node_count();
  for (std::size_t n = 0; n < nodes; ++n) {
    const auto c = g.node_coords(n);
    const double y = g.coord(1, c[1]);
    const double sp = amp * (2.0 * M_PI / g.side_lengths[1]) *
                      std::cos(2.0 * M_PI * y / g.side_lengths[1]);
    m.at(n, 0, 0) = 1.0;
    m.at(n, 0, 1) = sp;
    m.at(n, 1, 1) = 1.0 + sp * sp;
    for (int i = 2; i < g.dim; ++i) m.at(n, i, i) = 1.0;
  }
  m.require_admissible();
  return m;
}

MetricField product_conformal_metric(const GridSpec& g, double amp,
                                     int wavenumber) {
  if (g.dim != 3)
    throw std::invalid_argument("product metric preset needs dim 3");
  MetricField m(g);
  const std::size_t nodes = g.node_count();
  for (std::size_t n = 0; n < nodes; ++n) {
    const auto c = g.node_coords(n);
    const double x = g.coord(0, c[0]);
    const double phi =
        amp * std::sin(2.0 * M_PI * wavenumber * x / g.side_lengths[0]);
    const double f = std::exp(2.0 * phi);
    m.at(n, 0, 0) = f;
    m.at(n, 1, 1) = f;
    m.at(n, 2, 2) = 1.0;
  }
  m.require_admissible();
  return m;
}

}  // namespace rsl
