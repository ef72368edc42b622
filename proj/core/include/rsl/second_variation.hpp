#pragma once

#include "rsl/field.hpp"
#include "rsl/poisson.hpp"

namespace rsl {

struct SecondVariationSettings {
  CgSettings cg;
  double flat_tol = 1e-8;  // sup-norm Ricci-flatness gate for the background
};

struct SecondVariationResult {
  SymTensorField Lh;
  double quad = 0.0;  // <Lh, h> in the dV_{g0} pairing
  bool converged = false;
  CgResult poisson;
  ScalarField v_h;  // mean-zero auxiliary potential
};

/// Second-variation operator of lambda at a Ricci-flat background:
///   L h = 1/2 Delta_L h + div* div h + 1/2 Hess(v_h),  Lap v_h = div div h,
/// where div* = -delta* is the formal adjoint of div in this artifact's
/// conventions.  The second variation of lambda itself carries the
/// normalized measure: d^2/ds^2 lambda(g0 + s h) = <Lh, h> / Vol(g0).
///
/// Throws std::domain_error if g0 is not Ricci-flat within flat_tol.
SecondVariationResult second_variation_L(
    const SymTensorField& h, const MetricField& g0,
    const SecondVariationSettings& settings = {});

}  // namespace rsl
