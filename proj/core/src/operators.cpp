#include "rsl/operators.hpp"

#include <cmath>
#include <stdexcept>

#include "rsl/fd.hpp"

namespace rsl {

namespace {

void check_grid(const detail::FieldBase& a, const detail::FieldBase& b) {
  if (!a.grid().compatible_with(b.grid()))
    throw std::invalid_argument("operator arguments live on different grids");
}

// nabla_a h_ij = d_a h_ij - Gamma^m_{ai} h_mj - Gamma^m_{aj} h_im,
// stored as [axis][sym component] per node
struct CovDerivSym {
  std::vector<SymTensorField> t;  // t[a]
};

CovDerivSym cov_deriv(const SymTensorField& h, const ChristoffelField& chris) {
  const GridSpec& grid = h.grid();
  const int dim = grid.dim;
  const std::size_t nodes = grid.node_count();
  CovDerivSym out;
  out.t.reserve(dim);
  for (int a = 0; a < dim; ++a) out.t.push_back(partial_derivative(h, a, 1));
  for (int a = 0; a < dim; ++a) {
    SymTensorField& ta = out.t[a];
    for (std::size_t n = 0; n < nodes; ++n)
      for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j) {
          double corr = 0.0;
          for (int m = 0; m < dim; ++m) {
            corr += chris.gamma(n, m, a, i) * h.at(n, m, j);
            corr += chris.gamma(n, m, a, j) * h.at(n, i, m);
          }
          ta.at(n, i, j) -= corr;
        }
  }
  return out;
}

}  // namespace

VectorField divergence(const SymTensorField& h, const MetricField& g,
                       const ChristoffelField& chris,
                       const SymTensorField& inv) {
  check_grid(h, g);
  const GridSpec& grid = h.grid();
  const int dim = grid.dim;
  const std::size_t nodes = grid.node_count();
  CovDerivSym T = cov_deriv(h, chris);
  VectorField out(grid);
  for (std::size_t n = 0; n < nodes; ++n) {
    const SymMat gi = inv.matrix_at(n);
    for (int j = 0; j < dim; ++j) {
      double s = 0.0;
      for (int a = 0; a < dim; ++a)
        for (int i = 0; i < dim; ++i) s += gi(a, i) * T.t[a].at(n, i, j);
      out.at(n, j) = s;
    }
  }
  return out;
}

VectorField divergence(const SymTensorField& h, const MetricField& g) {
  if (g.is_constant()) {
    // constant metric: Gamma = 0 exactly
    const GridSpec& grid = h.grid();
    const int dim = grid.dim;
    const std::size_t nodes = grid.node_count();
    const SymMat gi = g.matrix_at(0).inverse();
    std::vector<SymTensorField> dh;
    dh.reserve(dim);
    for (int a = 0; a < dim; ++a) dh.push_back(partial_derivative(h, a, 1));
    VectorField out(grid);
    for (std::size_t n = 0; n < nodes; ++n)
      for (int j = 0; j < dim; ++j) {
        double s = 0.0;
        for (int a = 0; a < dim; ++a)
          for (int i = 0; i < dim; ++i) s += gi(a, i) * dh[a].at(n, i, j);
        out.at(n, j) = s;
      }
    return out;
  }
  RicciPack pack = ricci_of(g);
  return divergence(h, g, pack.christoffel, pack.inv_metric);
}

SymTensorField div_adjoint(const VectorField& X, const MetricField& g,
                           const ChristoffelField& chris) {
  check_grid(X, g);
  const GridSpec& grid = X.grid();
  const int dim = grid.dim;
  const std::size_t nodes = grid.node_count();
  std::vector<VectorField> dX;
  dX.reserve(dim);
  for (int a = 0; a < dim; ++a) dX.push_back(partial_derivative(X, a, 1));
  SymTensorField out(grid);
  for (std::size_t n = 0; n < nodes; ++n)
    for (int i = 0; i < dim; ++i)
      for (int j = i; j < dim; ++j) {
        double v = 0.5 * (dX[i].at(n, j) + dX[j].at(n, i));
        for (int m = 0; m < dim; ++m)
          v -= chris.gamma(n, m, i, j) * X.at(n, m);
        out.at(n, i, j) = v;
      }
  return out;
}

SymTensorField div_adjoint(const VectorField& X, const MetricField& g) {
  if (g.is_constant()) {
    const GridSpec& grid = X.grid();
    const int dim = grid.dim;
    const std::size_t nodes = grid.node_count();
    std::vector<VectorField> dX;
    dX.reserve(dim);
    for (int a = 0; a < dim; ++a) dX.push_back(partial_derivative(X, a, 1));
    SymTensorField out(grid);
    for (std::size_t n = 0; n < nodes; ++n)
      for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j)
          out.at(n, i, j) = 0.5 * (dX[i].at(n, j) + dX[j].at(n, i));
    return out;
  }
  RicciPack pack = ricci_of(g);
  return div_adjoint(X, g, pack.christoffel);
}

SymTensorField hessian(const ScalarField& f, const MetricField& g,
                       const ChristoffelField& chris) {
  check_grid(f, g);
  const GridSpec& grid = f.grid();
  const int dim = grid.dim;
  const std::size_t nodes = grid.node_count();
  std::vector<ScalarField> df;
  df.reserve(dim);
  for (int a = 0; a < dim; ++a) df.push_back(partial_derivative(f, a, 1));
  SymTensorField out(grid);
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) {
      ScalarField dd = second_partial(f, i, j);
      for (std::size_t n = 0; n < nodes; ++n) {
        double v = dd[n];
        for (int m = 0; m < dim; ++m)
          v -= chris.gamma(n, m, i, j) * df[m][n];
        out.at(n, i, j) = v;
      }
    }
  return out;
}

SymTensorField hessian(const ScalarField& f, const MetricField& g) {
  if (g.is_constant()) {
    const GridSpec& grid = f.grid();
    const int dim = grid.dim;
    const std::size_t nodes = grid.node_count();
    SymTensorField out(grid);
    for (int i = 0; i < dim; ++i)
      for (int j = i; j < dim; ++j) {
        ScalarField dd = second_partial(f, i, j);
        for (std::size_t n = 0; n < nodes; ++n) out.at(n, i, j) = dd[n];
      }
    return out;
  }
  RicciPack pack = ricci_of(g);
  return hessian(f, g, pack.christoffel);
}

// divergence form (1/sqrt(det g)) d_i( sqrt(det g) g^{ij} d_j f ); a discrete
// route independent of the Christoffel-based Hessian trace
ScalarField laplace_beltrami(const ScalarField& f, const MetricField& g) {
  const GridSpec& grid = f.grid();
  const int dim = grid.dim;
  const std::size_t nodes = grid.node_count();
  SymTensorField inv = g.inverse_field();
  ScalarField sqrtdet(grid);
  for (std::size_t n = 0; n < nodes; ++n)
    sqrtdet[n] = std::sqrt(g.matrix_at(n).det());

  std::vector<ScalarField> df;
  df.reserve(dim);
  for (int a = 0; a < dim; ++a) df.push_back(partial_derivative(f, a, 1));

  ScalarField out(grid);
  for (int i = 0; i < dim; ++i) {
    ScalarField flux(grid);
    for (std::size_t n = 0; n < nodes; ++n) {
      const SymMat gi = inv.matrix_at(n);
      double s = 0.0;
      for (int j = 0; j < dim; ++j) s += gi(i, j) * df[j][n];
      flux[n] = sqrtdet[n] * s;
    }
    ScalarField dflux = partial_derivative(flux, i, 1);
    for (std::size_t n = 0; n < nodes; ++n) out[n] += dflux[n];
  }
  for (std::size_t n = 0; n < nodes; ++n) out[n] /= sqrtdet[n];
  return out;
}

namespace {

// rough Laplacian for a constant metric: g^{ab} d_a d_b applied per component
SymTensorField flat_rough_laplacian(const SymTensorField& h, const SymMat& gi) {
  const GridSpec& grid = h.grid();
  const int dim = grid.dim;
  SymTensorField out(grid);
  for (int a = 0; a < dim; ++a)
    for (int b = a; b < dim; ++b) {
      const double w = (a == b) ? gi(a, b) : 2.0 * gi(a, b);
      if (w == 0.0) continue;
      SymTensorField dd(grid);
      if (a == b) {
        dd = partial_derivative(h, a, 2);
      } else {
        dd = partial_derivative(partial_derivative(h, a, 1), b, 1);
      }
      out.add_scaled(w, dd);
    }
  return out;
}

}  // namespace

SymTensorField lichnerowicz_apply(const SymTensorField& h,
                                  const MetricField& g) {
  check_grid(h, g);
  if (g.is_constant())
    return flat_rough_laplacian(h, g.matrix_at(0).inverse());
  CurvaturePack pack = curvature_of(g);
  return lichnerowicz_apply(h, g, pack);
}

SymTensorField lichnerowicz_apply(const SymTensorField& h,
                                  const MetricField& g,
                                  const CurvaturePack& pack,
                                  double curvature_term_factor) {
  check_grid(h, g);
  const GridSpec& grid = h.grid();
  const int dim = grid.dim;
  const std::size_t nodes = grid.node_count();

  SymTensorField out(grid);
  if (g.is_constant()) {
    out = flat_rough_laplacian(h, g.matrix_at(0).inverse());
  } else {
    // Delta h_ij = g^{ab} nabla_a nabla_b h_ij
    CovDerivSym T = cov_deriv(h, pack.christoffel);
    std::vector<std::vector<SymTensorField>> dT(dim);
    for (int b = 0; b < dim; ++b) {
      dT[b].reserve(dim);
      for (int a = 0; a < dim; ++a)
        dT[b].push_back(partial_derivative(T.t[b], a, 1));
    }
    for (std::size_t n = 0; n < nodes; ++n) {
      const SymMat gi = pack.inv_metric.matrix_at(n);
      for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j) {
          double s = 0.0;
          for (int a = 0; a < dim; ++a)
            for (int b = 0; b < dim; ++b) {
              if (gi(a, b) == 0.0) continue;
              double u = dT[b][a].at(n, i, j);
              for (int l = 0; l < dim; ++l) {
                u -= pack.christoffel.gamma(n, l, a, b) * T.t[l].at(n, i, j);
                u -= pack.christoffel.gamma(n, l, a, i) * T.t[b].at(n, l, j);
                u -= pack.christoffel.gamma(n, l, a, j) * T.t[b].at(n, i, l);
              }
              s += gi(a, b) * u;
            }
          out.at(n, i, j) = s;
        }
    }
  }

  // + factor * R_{ipqj} h^{pq}; skip when the metric is constant (flat)
  if (!g.is_constant() && curvature_term_factor != 0.0) {
    for (std::size_t n = 0; n < nodes; ++n) {
      const SymMat gi = pack.inv_metric.matrix_at(n);
      const SymMat hm = h.matrix_at(n);
      SymMat hup;
      hup.dim = dim;
      for (int p = 0; p < dim; ++p)
        for (int q = p; q < dim; ++q) {
          double s = 0.0;
          for (int a = 0; a < dim; ++a)
            for (int b = 0; b < dim; ++b)
              s += gi(p, a) * gi(q, b) * hm(a, b);
          hup(p, q) = s;
        }
      for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j) {
          double s = 0.0;
          for (int p = 0; p < dim; ++p)
            for (int q = 0; q < dim; ++q)
              s += 0.5 * (pack.riemann.at(n, i, p, q, j) +
                          pack.riemann.at(n, j, p, q, i)) *
                   hup(p, q);
          out.at(n, i, j) += curvature_term_factor * s;
        }
    }
  }
  return out;
}

SymTensorField deturck_correction(const MetricField& g, const MetricField& g0,
                                  const RicciPack& pack_g,
                                  const ChristoffelField& chris_g0) {
  check_grid(g, g0);
  const GridSpec& grid = g.grid();
  const int dim = grid.dim;
  const std::size_t nodes = grid.node_count();

  // W^k = g^{pq} (Gamma^k_{pq}(g) - Gamma^k_{pq}(g0)), lowered with g
  VectorField W(grid);
  for (std::size_t n = 0; n < nodes; ++n) {
    const SymMat gi = pack_g.inv_metric.matrix_at(n);
    const SymMat gm = g.matrix_at(n);
    std::array<double, 3> wup{0.0, 0.0, 0.0};
    for (int k = 0; k < dim; ++k) {
      double s = 0.0;
      for (int p = 0; p < dim; ++p)
        for (int q = 0; q < dim; ++q)
          s += gi(p, q) * (pack_g.christoffel.gamma(n, k, p, q) -
                           chris_g0.gamma(n, k, p, q));
      wup[k] = s;
    }
    for (int j = 0; j < dim; ++j) {
      double s = 0.0;
      for (int k = 0; k < dim; ++k) s += gm(j, k) * wup[k];
      W.at(n, j) = s;
    }
  }

  SymTensorField p = div_adjoint(W, g, pack_g.christoffel);
  p.scale(2.0);
  return p;
}

SymTensorField deturck_correction(const MetricField& g,
                                  const MetricField& g0) {
  RicciPack pack = ricci_of(g);
  ChristoffelField chris0(g0.grid());
  // cheap path: constant reference has vanishing Christoffels
  if (!g0.is_constant()) {
    RicciPack pack0 = ricci_of(g0);
    chris0 = std::move(pack0.christoffel);
  }
  return deturck_correction(g, g0, pack, chris0);
}

ScalarField divergence(const VectorField& X, const MetricField& g) {
  check_grid(X, g);
  const GridSpec& grid = X.grid();
  const int dim = grid.dim;
  const std::size_t nodes = grid.node_count();
  std::vector<VectorField> dX;
  dX.reserve(dim);
  for (int a = 0; a < dim; ++a) dX.push_back(partial_derivative(X, a, 1));

  ScalarField out(grid);
  if (g.is_constant()) {
    const SymMat gi = g.matrix_at(0).inverse();
    for (std::size_t n = 0; n < nodes; ++n) {
      double s = 0.0;
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) s += gi(i, j) * dX[i].at(n, j);
      out[n] = s;
    }
    return out;
  }
  RicciPack pack = ricci_of(g);
  for (std::size_t n = 0; n < nodes; ++n) {
    const SymMat gi = pack.inv_metric.matrix_at(n);
    double s = 0.0;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) {
        double cov = dX[i].at(n, j);
        for (int m = 0; m < dim; ++m)
          cov -= pack.christoffel.gamma(n, m, i, j) * X.at(n, m);
        s += gi(i, j) * cov;
      }
    out[n] = s;
  }
  return out;
}

ScalarField trace_field(const SymTensorField& h, const SymTensorField& inv) {
  const GridSpec& grid = h.grid();
  const std::size_t nodes = grid.node_count();
  ScalarField out(grid);
  for (std::size_t n = 0; n < nodes; ++n)
    out[n] = h.matrix_at(n).trace_with(inv.matrix_at(n));
  return out;
}

}  // namespace rsl
