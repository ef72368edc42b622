#pragma once

#include "rsl/field.hpp"

namespace rsl {

/// Metric families used by experiments and oracles.

/// e^{2 phi} * delta with phi = amp * sin(2 pi k x_axis / L_axis).
MetricField conformal_metric(const GridSpec& g, double amp, int wavenumber = 1,
                             int axis = 0);

/// (1 + amp * sin(2 pi k x_axis / L_axis)) * delta  (not conformal for n=3).
MetricField scaled_identity_metric(const GridSpec& g, double amp,
                                   int wavenumber = 1, int axis = 0);

/// Pullback of the flat metric by the shear x0 -> x0 + amp * sin(2 pi x1 / L1):
/// a non-constant metric that is isometric to the flat one (pure gauge).
MetricField shear_metric(const GridSpec& g, double amp);

/// Product metric on T^3: conformal T^2 factor in axes (0,1), flat in axis 2.
MetricField product_conformal_metric(const GridSpec& g, double amp,
                                     int wavenumber = 1);

}  // namespace rsl
