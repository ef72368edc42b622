#pragma once

#include "rsl/field.hpp"
#include "rsl/poisson.hpp"

namespace rsl {

struct DecomposeSettings {
  CgSettings cg;
};

/// Orthogonal splitting of a symmetric 2-tensor at a flat (constant) metric:
///   S_2 = im delta* + ker div = C + E + N + G + S
/// with C = delta* of the divergence-free part of the gauge vector,
/// E = Hessians, N = transverse-traceless, G = constant multiples of g,
/// S = (Lap f) g - Hess f.  residual = h - (c+e+n+g+s) reports solver error.
struct Decomposition {
  SymTensorField c_part;
  SymTensorField e_part;
  SymTensorField n_part;
  SymTensorField g_part;
  SymTensorField s_part;
  SymTensorField residual;
  bool converged = false;
  CgResult gauge_solve;
  CgResult hodge_solve;
  CgResult trace_solve;
};

Decomposition decompose(const SymTensorField& h, const MetricField& g,
                        const DecomposeSettings& settings = {});

}  // namespace rsl
