#include "rsl/decompose.hpp"

#include <stdexcept>

#include "rsl/fd.hpp"
#include "rsl/inner.hpp"
#include "rsl/operators.hpp"

namespace rsl {

namespace {

// Hessian from repeated first differences on a constant background.  This is
// the operator whose symbols match the product-form elliptic solves, so the
// E and S constructions stay bounded on every mode the solves can represent
// (the true-symbol Hessian amplifies Nyquist-adjacent content instead).
SymTensorField product_hessian_flat(const ScalarField& f) {
  const GridSpec& grid = f.grid();
  const int dim = grid.dim;
  SymTensorField out(grid);
  std::vector<ScalarField> df;
  df.reserve(dim);
  for (int a = 0; a < dim; ++a) df.push_back(partial_derivative(f, a, 1));
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) {
      ScalarField dd = partial_derivative(df[i], j, 1);
      for (std::size_t n = 0; n < grid.node_count(); ++n)
        out.at(n, i, j) = dd[n];
    }
  return out;
}

}  // namespace

Decomposition decompose(const SymTensorField& h, const MetricField& g,
                        const DecomposeSettings& settings) {
  const GridSpec& grid = h.grid();
  if (!grid.compatible_with(g.grid()))
    throw std::invalid_argument("decompose: incompatible grids");
  if (!g.is_constant())
    throw std::domain_error(
        "decompose is defined on constant flat backgrounds");
  const int dim = grid.dim;
  const std::size_t nodes = grid.node_count();
  auto w = volume_weight(g);

  Decomposition out{SymTensorField(grid), SymTensorField(grid),
                    SymTensorField(grid), SymTensorField(grid),
                    SymTensorField(grid), SymTensorField(grid),
                    false,                CgResult{},
                    CgResult{},           CgResult{}};

  // right-hand sides at roundoff level are treated as zero (the elliptic
  // solves are only determined up to their kernels anyway)
  const double zero_rhs = 1e-13 * std::max(1.0, h.sup_norm());

  // gauge vector: div(delta* X) = div h, X mean-zero
  VectorField div_h = divergence(h, g);
  VectorField X(grid);
  if (div_h.sup_norm() <= zero_rhs)
    out.gauge_solve.converged = true;
  else
    out.gauge_solve = solve_gauge(g, w, div_h, X, settings.cg);

  // Hodge split X = d(phi) + xi with div xi = 0: E from phi, C from xi
  ScalarField div_X = divergence(X, g);
  ScalarField phi(grid);
  if (div_X.sup_norm() <= zero_rhs)
    out.hodge_solve.converged = true;
  else
    out.hodge_solve = solve_poisson(g, w, div_X, phi, settings.cg);
  VectorField xi = X;
  for (int a = 0; a < dim; ++a) {
    ScalarField dphi = partial_derivative(phi, a, 1);
    for (std::size_t n = 0; n < nodes; ++n) xi.at(n, a) -= dphi[n];
  }
  out.e_part = product_hessian_flat(phi);
  out.c_part = div_adjoint(xi, g);

  // remainder is divergence-free up to solver error
  SymTensorField r = h;
  r.add_scaled(-1.0, out.c_part);
  r.add_scaled(-1.0, out.e_part);

  // G: constant multiple of g
  const double alpha = inner_product(r, g, w) / inner_product(g, g, w);
  out.g_part = g;
  out.g_part.scale(alpha);
  SymTensorField r2 = r;
  r2.add_scaled(-1.0, out.g_part);

  // S: (Lap f) g - Hess f fixed by the trace, (dim-1) Lap f = tr r2
  SymTensorField inv = g.inverse_field();
  ScalarField tau = trace_field(r2, inv);
  ScalarField trace_rhs(grid);
  for (std::size_t n = 0; n < nodes; ++n)
    trace_rhs[n] = tau[n] / static_cast<double>(dim - 1);
  ScalarField f(grid);
  if (trace_rhs.sup_norm() <= zero_rhs)
    out.trace_solve.converged = true;
  else
    out.trace_solve = solve_poisson(g, w, trace_rhs, f, settings.cg);
  SymTensorField hess_f = product_hessian_flat(f);
  ScalarField lap_f = trace_field(hess_f, inv);
  out.s_part = SymTensorField(grid);
  for (std::size_t n = 0; n < nodes; ++n)
    for (int i = 0; i < dim; ++i)
      for (int j = i; j < dim; ++j)
        out.s_part.at(n, i, j) = lap_f[n] * g.at(n, i, j) - hess_f.at(n, i, j);

  // N: transverse-traceless remainder.  Trace content the solve could not
  // represent (the Nyquist sector is invisible to the first-derivative
  // symbols) is removed pointwise; that correction is itself
  // divergence-free for the same reason and is booked under the residual.
  out.n_part = r2;
  out.n_part.add_scaled(-1.0, out.s_part);
  ScalarField unresolved = trace_field(out.n_part, inv);
  for (std::size_t n = 0; n < nodes; ++n) {
    const double fix = unresolved[n] / static_cast<double>(dim);
    for (int i = 0; i < dim; ++i)
      for (int j = i; j < dim; ++j)
        out.n_part.at(n, i, j) -= fix * g.at(n, i, j);
  }

  // re-sum check (solver/roundoff error)
  out.residual = h;
  out.residual.add_scaled(-1.0, out.c_part);
  out.residual.add_scaled(-1.0, out.e_part);
  out.residual.add_scaled(-1.0, out.n_part);
  out.residual.add_scaled(-1.0, out.g_part);
  out.residual.add_scaled(-1.0, out.s_part);

  out.converged = out.gauge_solve.converged && out.hodge_solve.converged &&
                  out.trace_solve.converged;
  return out;
}

}  // namespace rsl
