#pragma once

#include "rsl/curvature.hpp"
#include "rsl/field.hpp"

namespace rsl {

/// (div h)_j = g^{ai} nabla_a h_{ij}.  No sign flip; the formal adjoint of
/// div in the dV_g pairing is -div_adjoint, i.e.
///   <div_adjoint(X), h> = -<X, div(h)>.
VectorField divergence(const SymTensorField& h, const MetricField& g);
VectorField divergence(const SymTensorField& h, const MetricField& g,
                       const ChristoffelField& chris,
                       const SymTensorField& inv);

/// (delta* X)_ij = (nabla_i X_j + nabla_j X_i) / 2, one half of the Lie
/// derivative of g along the raised X.
SymTensorField div_adjoint(const VectorField& X, const MetricField& g);
SymTensorField div_adjoint(const VectorField& X, const MetricField& g,
                           const ChristoffelField& chris);

/// nabla_i nabla_j f = d_i d_j f - Gamma^m_{ij} d_m f.
SymTensorField hessian(const ScalarField& f, const MetricField& g);
SymTensorField hessian(const ScalarField& f, const MetricField& g,
                       const ChristoffelField& chris);

/// Scalar Laplace-Beltrami via trace of the Hessian.
ScalarField laplace_beltrami(const ScalarField& f, const MetricField& g);

/// Lichnerowicz-type operator Delta h_{ij} + 2 R_{ipqj} h^{pq} (rough
/// Laplacian plus curvature action; the Ricci correction terms vanish on
/// the Ricci-flat backgrounds this artifact works at).  Constant metrics
/// reduce exactly to the componentwise Laplacian.
SymTensorField lichnerowicz_apply(const SymTensorField& h,
                                  const MetricField& g);
SymTensorField lichnerowicz_apply(const SymTensorField& h,
                                  const MetricField& g,
                                  const CurvaturePack& pack,
                                  double curvature_term_factor = 2.0);

/// DeTurck gauge term P_{g0}(g) = nabla_i W_j + nabla_j W_i with
/// W^k = g^{pq} (Gamma^k_{pq}(g) - Gamma^k_{pq}(g0)), lowered and
/// differentiated with g.  Vanishes when g == g0 and whenever both metrics
/// are constant.
SymTensorField deturck_correction(const MetricField& g, const MetricField& g0);
SymTensorField deturck_correction(const MetricField& g, const MetricField& g0,
                                  const RicciPack& pack_g,
                                  const ChristoffelField& chris_g0);

/// Covariant divergence of a 1-form: div X = g^{ij} nabla_i X_j.
ScalarField divergence(const VectorField& X, const MetricField& g);

/// Pointwise trace tr_g h = g^{ij} h_ij.
ScalarField trace_field(const SymTensorField& h, const SymTensorField& inv);

}  // namespace rsl
