#include "rsl/curvature.hpp"

#include <cmath>

#include "rsl/fd.hpp"

namespace rsl {

double RiemannField::sup_norm() const {
  double m = 0.0;
  for (double x : data) m = std::max(m, std::abs(x));
  return m;
}

namespace {

struct Derivs {
  // dg[a] = partial_a g, as raw sym arrays
  std::vector<SymTensorField> dg;
};

ChristoffelField christoffel_of(const MetricField& g,
                                const SymTensorField& inv,
                                std::vector<SymTensorField>& dg_out) {
  const GridSpec& grid = g.grid();
  const int dim = grid.dim;
  const std::size_t nodes = grid.node_count();

  dg_out.clear();
  dg_out.reserve(dim);
  for (int a = 0; a < dim; ++a) dg_out.push_back(partial_derivative(g, a, 1));

  ChristoffelField chris(grid);
  for (std::size_t n = 0; n < nodes; ++n) {
    const SymMat gi = inv.matrix_at(n);
    for (int i = 0; i < dim; ++i)
      for (int j = i; j < dim; ++j)
        for (int k = 0; k < dim; ++k) {
          double s = 0.0;
          for (int l = 0; l < dim; ++l) {
            const double t = dg_out[i].at(n, l, j) + dg_out[j].at(n, l, i) -
                             dg_out[l].at(n, i, j);
            s += gi(k, l) * t;
          }
          chris.gamma(n, k, i, j) = 0.5 * s;
        }
  }
  return chris;
}

// partial_a of the christoffel array, one field per axis
std::vector<std::vector<double>> christoffel_derivs(
    const ChristoffelField& chris) {
  const GridSpec& grid = chris.grid;
  const int ncomp = grid.dim * grid.sym_components();
  std::vector<std::vector<double>> d(grid.dim);
  for (int a = 0; a < grid.dim; ++a) {
    d[a].resize(chris.data.size());
    apply_partial(grid, chris.data, d[a], ncomp, a, 1);
  }
  return d;
}

double dgamma(const GridSpec& grid, const std::vector<double>& darr,
              std::size_t node, int k, int i, int j) {
  const int nsym = grid.sym_components();
  return darr[(node * grid.dim + k) * nsym + sym_index(i, j, grid.dim)];
}

// Ricci_{bc} = sum_a [ d_a Gamma^a_{bc} - d_b Gamma^a_{ac}
//                      + Gamma^a_{aL} Gamma^L_{bc} - Gamma^a_{bL} Gamma^L_{ac} ],
// symmetrized over (b,c) to absorb the stencil's commutation defect.
void ricci_scalar_from(const GridSpec& grid, const ChristoffelField& chris,
                       const std::vector<std::vector<double>>& dchris,
                       const SymTensorField& inv, SymTensorField& ricci,
                       ScalarField& scalar) {
  const int dim = grid.dim;
  const std::size_t nodes = grid.node_count();
  auto entry = [&](std::size_t n, int b, int c) {
    double s = 0.0;
    for (int a = 0; a < dim; ++a) {
      s += dgamma(grid, dchris[a], n, a, b, c);
      s -= dgamma(grid, dchris[b], n, a, a, c);
      for (int l = 0; l < dim; ++l) {
        s += chris.gamma(n, a, a, l) * chris.gamma(n, l, b, c);
        s -= chris.gamma(n, a, b, l) * chris.gamma(n, l, a, c);
      }
    }
    return s;
  };
  for (std::size_t n = 0; n < nodes; ++n) {
    for (int b = 0; b < dim; ++b)
      for (int c = b; c < dim; ++c)
        ricci.at(n, b, c) = 0.5 * (entry(n, b, c) + entry(n, c, b));
    const SymMat gi = inv.matrix_at(n);
    double r = 0.0;
    for (int b = 0; b < dim; ++b)
      for (int c = 0; c < dim; ++c) r += gi(b, c) * ricci.at(n, b, c);
    scalar[n] = r;
  }
}

}  // namespace

RicciPack ricci_of(const MetricField& g) {
  g.require_admissible();
  const GridSpec& grid = g.grid();
  SymTensorField inv = g.inverse_field();
  std::vector<SymTensorField> dg;
  ChristoffelField chris = christoffel_of(g, inv, dg);
  auto dchris = christoffel_derivs(chris);
  SymTensorField ricci(grid);
  ScalarField scalar(grid);
  ricci_scalar_from(grid, chris, dchris, inv, ricci, scalar);
  return RicciPack{std::move(inv), std::move(chris), std::move(ricci),
                   std::move(scalar)};
}

CurvaturePack curvature_of(const MetricField& g) {
  g.require_admissible();
  const GridSpec& grid = g.grid();
  const int dim = grid.dim;
  const std::size_t nodes = grid.node_count();

  SymTensorField inv = g.inverse_field();
  std::vector<SymTensorField> dg;
  ChristoffelField chris = christoffel_of(g, inv, dg);
  auto dchris = christoffel_derivs(chris);

  // R^m_{cab} with R(e_a,e_b)e_c = R^m_{cab} e_m, lowered by g_{dm}:
  // R_{abcd} = g_{dm} [ d_a Gamma^m_{bc} - d_b Gamma^m_{ac}
  //                     + Gamma^m_{aL} Gamma^L_{bc} - Gamma^m_{bL} Gamma^L_{ac} ]
  RiemannField riem(grid);
  for (std::size_t n = 0; n < nodes; ++n) {
    const SymMat gm = g.matrix_at(n);
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b) {
        if (a == b) continue;  // antisymmetric slot, stays zero
        for (int c = 0; c < dim; ++c)
          for (int d = 0; d < dim; ++d) {
            double s = 0.0;
            for (int m = 0; m < dim; ++m) {
              double up = dgamma(grid, dchris[a], n, m, b, c) -
                          dgamma(grid, dchris[b], n, m, a, c);
              for (int l = 0; l < dim; ++l) {
                up += chris.gamma(n, m, a, l) * chris.gamma(n, l, b, c);
                up -= chris.gamma(n, m, b, l) * chris.gamma(n, l, a, c);
              }
              s += gm(d, m) * up;
            }
            riem.at(n, a, b, c, d) = s;
          }
      }
  }

  SymTensorField ricci(grid);
  ScalarField scalar(grid);
  ricci_scalar_from(grid, chris, dchris, inv, ricci, scalar);

  return CurvaturePack{std::move(chris), std::move(riem), std::move(ricci),
                       std::move(scalar), std::move(inv)};
}

}  // namespace rsl
