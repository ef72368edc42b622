#pragma once

#include <span>

#include "rsl/field.hpp"
#include "rsl/grid.hpp"

namespace rsl {

/// d^order/dx_axis^order of every component of an interleaved node-major
/// array, with periodic wrap, using the grid's differentiation scheme.
/// order must be 1 or 2.
void apply_partial(const GridSpec& g, std::span<const double> in,
                   std::span<double> out, int ncomp, int axis, int order);

ScalarField partial_derivative(const ScalarField& f, int axis, int order = 1);
VectorField partial_derivative(const VectorField& f, int axis, int order = 1);
SymTensorField partial_derivative(const SymTensorField& f, int axis,
                                  int order = 1);

/// Mixed second partial d2/(dx_a dx_b).  For a == b this is the grid's
/// second-derivative operator; for a != b two first-derivative applications.
ScalarField second_partial(const ScalarField& f, int a, int b);

}  // namespace rsl
