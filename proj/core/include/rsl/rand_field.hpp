#pragma once

#include <cstdint>

#include "rsl/field.hpp"

namespace rsl {

/// Seeded band-limited fields: independent Gaussian amplitudes on every
/// nonzero integer wavevector with |k|_inf <= max_wavenumber, summed in real
/// space in a fixed order, then rescaled so the sup-norm over all components
/// equals `amplitude` exactly.  The k = 0 mode is excluded, so perturbations
/// are zero-mean; constant offsets are added explicitly where an experiment
/// wants them.  Deterministic per (seed, grid, band): the generator consumes
/// uniform bits from mt19937_64 through a fixed Box-Muller mapping, so the
/// result does not depend on the standard library's distribution internals.
///
/// amplitude = 0 returns the zero field.
SymTensorField band_limited_perturbation(const GridSpec& g, std::uint64_t seed,
                                         int max_wavenumber, double amplitude);

VectorField band_limited_vector(const GridSpec& g, std::uint64_t seed,
                                int max_wavenumber, double amplitude);

ScalarField band_limited_scalar(const GridSpec& g, std::uint64_t seed,
                                int max_wavenumber, double amplitude);

}  // namespace rsl
