#include "rsl/second_variation.hpp"

#include <stdexcept>

#include "rsl/inner.hpp"
#include "rsl/operators.hpp"

namespace rsl {

SecondVariationResult second_variation_L(
    const SymTensorField& h, const MetricField& g0,
    const SecondVariationSettings& settings) {
  const GridSpec& grid = h.grid();
  if (!grid.compatible_with(g0.grid()))
    throw std::invalid_argument("second variation: incompatible grids");
  g0.require_admissible();

  if (!g0.is_constant()) {
    RicciPack pack = ricci_of(g0);
    if (pack.ricci.sup_norm() > settings.flat_tol)
      throw std::domain_error(
          "second variation is restricted to Ricci-flat backgrounds");
  }

  auto w = volume_weight(g0);

  VectorField div_h = divergence(h, g0);
  ScalarField divdiv_h = divergence(div_h, g0);

  SecondVariationResult res{SymTensorField(grid), 0.0, false, CgResult{},
                            ScalarField(grid)};
  if (divdiv_h.sup_norm() <= 1e-13 * std::max(1.0, h.sup_norm()))
    res.poisson.converged = true;  // v_h = 0 for (numerically) TT input
  else
    res.poisson = solve_poisson(g0, w, divdiv_h, res.v_h, settings.cg);

  SymTensorField Lh = lichnerowicz_apply(h, g0);
  Lh.scale(0.5);
  Lh.add_scaled(-1.0, div_adjoint(div_h, g0));   // div* div h with div* = -delta*
  Lh.add_scaled(0.5, hessian(res.v_h, g0));

  res.quad = inner_product(Lh, h, w);
  res.Lh = std::move(Lh);
  res.converged = res.poisson.converged;
  return res;
}

}  // namespace rsl
