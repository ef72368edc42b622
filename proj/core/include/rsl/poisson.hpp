#pragma once

#include "rsl/field.hpp"
#include "rsl/inner.hpp"

namespace rsl {

struct CgSettings {
  double tol = 1e-12;       // relative residual target
  int max_iterations = 400;
};

struct CgResult {
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;  // final relative residual
};

/// Solve Lap_g v = rhs on the closed torus (divergence-form SPD system,
/// conjugate gradient with an FFT inverse-Laplacian preconditioner built from
/// the mean metric).  The equation only determines v up to constants; the
/// returned solution has dV_g-weighted mean zero, and the rhs is projected
/// onto mean zero first.
CgResult solve_poisson(const MetricField& g, const InnerProductWeight& w,
                       const ScalarField& rhs, ScalarField& v,
                       const CgSettings& settings = {});

/// Solve div_g(delta*_g X) = rhs for a vector field X on a constant metric
/// (the gauge solve of the decomposition).  Kernel = parallel fields, handled
/// by per-component mean-zero projection.
CgResult solve_gauge(const MetricField& g, const InnerProductWeight& w,
                     const VectorField& rhs, VectorField& X,
                     const CgSettings& settings = {});

}  // namespace rsl
