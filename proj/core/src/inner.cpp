#include "rsl/inner.hpp"

#include <cmath>
#include <stdexcept>

namespace rsl {

InnerProductWeight volume_weight(const MetricField& g) {
  const GridSpec& grid = g.grid();
  InnerProductWeight w{ScalarField(grid), SymTensorField(grid), 0.0};
  const double cell = grid.cell_volume();
  const std::size_t nodes = grid.node_count();
  double total = 0.0;
  for (std::size_t n = 0; n < nodes; ++n) {
    const SymMat m = g.matrix_at(n);
    const double d = m.det();
    if (!(d > 0.0))
      throw std::domain_error("volume weight needs a positive-definite metric");
    const double dv = std::sqrt(d) * cell;
    w.dV[n] = dv;
    total += dv;
    w.inv_metric.set_matrix_at(n, m.inverse());
  }
  w.total = total;
  return w;
}

namespace {
void check_grids(const detail::FieldBase& a, const detail::FieldBase& b,
                 const InnerProductWeight& w) {
  if (!a.grid().compatible_with(b.grid()) ||
      !a.grid().compatible_with(w.dV.grid()))
    throw std::invalid_argument("inner product: incompatible grids");
  if (a.components() != b.components())
    throw std::invalid_argument("inner product: rank mismatch");
}
}  // namespace

double inner_product(const ScalarField& a, const ScalarField& b,
                     const InnerProductWeight& w) {
  check_grids(a, b, w);
  const std::size_t nodes = a.grid().node_count();
  double s = 0.0;
  for (std::size_t n = 0; n < nodes; ++n) s += w.dV[n] * a[n] * b[n];
  return s;
}

double inner_product(const VectorField& a, const VectorField& b,
                     const InnerProductWeight& w) {
  check_grids(a, b, w);
  const GridSpec& g = a.grid();
  const int dim = g.dim;
  const std::size_t nodes = g.node_count();
  double s = 0.0;
  for (std::size_t n = 0; n < nodes; ++n) {
    const SymMat inv = w.inv_metric.matrix_at(n);
    double p = 0.0;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) p += inv(i, j) * a.at(n, i) * b.at(n, j);
    s += w.dV[n] * p;
  }
  return s;
}

double inner_product(const SymTensorField& a, const SymTensorField& b,
                     const InnerProductWeight& w) {
  check_grids(a, b, w);
  const GridSpec& g = a.grid();
  const int dim = g.dim;
  const std::size_t nodes = g.node_count();
  double s = 0.0;
  for (std::size_t n = 0; n < nodes; ++n) {
    const SymMat inv = w.inv_metric.matrix_at(n);
    const SymMat ma = a.matrix_at(n);
    const SymMat mb = b.matrix_at(n);
    double p = 0.0;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        for (int k = 0; k < dim; ++k)
          for (int l = 0; l < dim; ++l)
            p += inv(i, k) * inv(j, l) * ma(i, j) * mb(k, l);
    s += w.dV[n] * p;
  }
  return s;
}

double l2_norm(const ScalarField& a, const InnerProductWeight& w) {
  return std::sqrt(inner_product(a, a, w));
}
double l2_norm(const VectorField& a, const InnerProductWeight& w) {
  return std::sqrt(inner_product(a, a, w));
}
double l2_norm(const SymTensorField& a, const InnerProductWeight& w) {
  return std::sqrt(inner_product(a, a, w));
}

double mean(const ScalarField& a, const InnerProductWeight& w) {
  const std::size_t nodes = a.grid().node_count();
  double s = 0.0;
  for (std::size_t n = 0; n < nodes; ++n) s += w.dV[n] * a[n];
  return s / w.total;
}

}  // namespace rsl
