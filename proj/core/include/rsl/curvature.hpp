#pragma once

#include <vector>

#include "rsl/field.hpp"

namespace rsl {

/// Gamma^k_{ij} per node, symmetric in (i,j):
/// data[node * dim * nsym + k * nsym + sym_index(i,j)].
struct ChristoffelField {
  explicit ChristoffelField(const GridSpec& g)
      : grid(g), data(g.node_count() * g.dim * g.sym_components(), 0.0) {}

  double gamma(std::size_t node, int k, int i, int j) const {
    const int nsym = grid.sym_components();
    return data[(node * grid.dim + k) * nsym + sym_index(i, j, grid.dim)];
  }
  double& gamma(std::size_t node, int k, int i, int j) {
    const int nsym = grid.sym_components();
    return data[(node * grid.dim + k) * nsym + sym_index(i, j, grid.dim)];
  }

  GridSpec grid;
  std::vector<double> data;
};

/// Fully lowered curvature tensor R_{abcd} = g(R(e_a,e_b)e_c, e_d) with the
/// usual symmetries: antisymmetric in (a,b) and (c,d), symmetric under pair
/// exchange.  Sign convention fixed by the conformal oracle
/// R = -2 e^{-2 phi} Lap(phi) on T^2.
struct RiemannField {
  explicit RiemannField(const GridSpec& g)
      : grid(g),
        data(g.node_count() * g.dim * g.dim * g.dim * g.dim, 0.0) {}

  double at(std::size_t node, int a, int b, int c, int d) const {
    const int n = grid.dim;
    return data[((((node * n) + a) * n + b) * n + c) * n + d];
  }
  double& at(std::size_t node, int a, int b, int c, int d) {
    const int n = grid.dim;
    return data[((((node * n) + a) * n + b) * n + c) * n + d];
  }

  double sup_norm() const;

  GridSpec grid;
  std::vector<double> data;
};

struct CurvaturePack {
  ChristoffelField christoffel;
  RiemannField riemann;
  SymTensorField ricci;
  ScalarField scalar;
  SymTensorField inv_metric;
};

/// All pointwise curvature quantities of an admissible metric, from the same
/// differentiation scheme.  Riemann is obtained by differentiating the
/// Christoffel symbols so its antisymmetries hold to stencil accuracy;
/// constant metrics give exact zeros.
CurvaturePack curvature_of(const MetricField& g);

/// Cheaper variant without the rank-4 tensor, for flow right-hand sides.
struct RicciPack {
  SymTensorField inv_metric;
  ChristoffelField christoffel;
  SymTensorField ricci;
  ScalarField scalar;
};
RicciPack ricci_of(const MetricField& g);

}  // namespace rsl
