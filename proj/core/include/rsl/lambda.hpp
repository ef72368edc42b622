#pragma once

#include "rsl/curvature.hpp"
#include "rsl/field.hpp"
#include "rsl/inner.hpp"

namespace rsl {

/// F(g,f) = integral of e^{-f} (|grad f|_g^2 + R_g) dV_g by direct quadrature.
double perelman_F(const MetricField& g, const ScalarField& f);
double perelman_F(const MetricField& g, const ScalarField& f,
                  const InnerProductWeight& w, const ScalarField& scalar_curv);

struct LambdaSettings {
  double tol = 1e-11;       // LOBPCG residual tolerance (relative to operator scale)
  int max_iterations = 400;
  bool check_consistency = true;
};

struct LambdaResult {
  bool converged = false;
  double value = 0.0;        // lambda(g)
  ScalarField ground_state;  // u > 0, <u,u>_dV = 1
  ScalarField f;             // minimizing potential, f = -2 log u
  double consistency_gap = 0.0;  // |F(g, f) - lambda|
  int iterations = 0;
  double residual = 0.0;
};

/// lambda(g) as the smallest eigenvalue of the dV_g-weighted self-adjoint
/// discretization of -4 Lap_g + R_g, with its positive normalized ground
/// state.  The contract F(g, -2 log u) = lambda is evaluated and reported in
/// consistency_gap.  `warm_start` reuses a previous ground state.
LambdaResult lambda_of(const MetricField& g, const LambdaSettings& settings = {},
                       const ScalarField* warm_start = nullptr);

/// First variation D lambda(h) = integral u^2 <-Ric - Hess f, h> dV_g with
/// u, f from the lambda eigensolve.  Zero (to machine precision) at constant
/// metrics.
double first_variation_lambda(const MetricField& g, const SymTensorField& h,
                              const LambdaResult& lam);
double first_variation_lambda(const MetricField& g, const SymTensorField& h);

}  // namespace rsl
