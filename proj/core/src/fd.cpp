#include "rsl/fd.hpp"

#include <stdexcept>
#include <vector>

#include "spectral_engine.hpp"

namespace rsl {

namespace {

// node stride (in nodes) along an axis; axis 0 is fastest
std::size_t axis_stride(const GridSpec& g, int axis) {
  std::size_t s = 1;
  for (int a = 0; a < axis; ++a) s *= static_cast<std::size_t>(g.points_per_axis);
  return s;
}

void stencil_partial(const GridSpec& g, std::span<const double> in,
                     std::span<double> out, int ncomp, int axis, int order) {
  const int n = g.points_per_axis;
  const std::size_t stride = axis_stride(g, axis) * ncomp;
  const std::size_t total = in.size();
  const double h = g.spacing(axis);
  const bool o4 = g.scheme == DiffScheme::CentralO4;

  for (std::size_t idx = 0; idx < total; ++idx) {
    const std::size_t node = idx / ncomp;
    const int i = static_cast<int>((node / (stride / ncomp)) % n);
    const std::size_t base = idx - static_cast<std::size_t>(i) * stride;
    auto ring = [&](int j) {
      return in[base + static_cast<std::size_t>(((i + j) % n + n) % n) * stride];
    };
    double v;
    if (order == 1) {
      if (o4)
        v = (-ring(2) + 8.0 * ring(1) - 8.0 * ring(-1) + ring(-2)) / (12.0 * h);
      else
        v = (ring(1) - ring(-1)) / (2.0 * h);
    } else {
      if (o4)
        v = (-ring(2) + 16.0 * ring(1) - 30.0 * ring(0) + 16.0 * ring(-1) -
             ring(-2)) /
            (12.0 * h * h);
      else
        v = (ring(1) - 2.0 * ring(0) + ring(-1)) / (h * h);
    }
    out[idx] = v;
  }
}

void spectral_partial(const GridSpec& g, std::span<const double> in,
                      std::span<double> out, int ncomp, int axis, int order) {
  SpectralEngine& eng = SpectralEngine::instance(g);
  const std::size_t nodes = g.node_count();
  if (ncomp == 1) {
    eng.derivative(in, out, axis, order, g.side_lengths);
    return;
  }
  std::vector<double> scratch_in(nodes), scratch_out(nodes);
  for (int c = 0; c < ncomp; ++c) {
    for (std::size_t nidx = 0; nidx < nodes; ++nidx)
      scratch_in[nidx] = in[nidx * ncomp + c];
    eng.derivative(scratch_in, scratch_out, axis, order, g.side_lengths);
    for (std::size_t nidx = 0; nidx < nodes; ++nidx)
      out[nidx * ncomp + c] = scratch_out[nidx];
  }
}

}  // namespace

void apply_partial(const GridSpec& g, std::span<const double> in,
                   std::span<double> out, int ncomp, int axis, int order) {
  if (axis < 0 || axis >= g.dim) throw std::invalid_argument("axis out of range");
  if (order != 1 && order != 2)
    throw std::invalid_argument("derivative order must be 1 or 2");
  if (in.size() != out.size() || in.size() != g.node_count() * ncomp)
    throw std::invalid_argument("array size mismatch");

  if (g.scheme == DiffScheme::Spectral)
    spectral_partial(g, in, out, ncomp, axis, order);
  else
    stencil_partial(g, in, out, ncomp, axis, order);
}

ScalarField partial_derivative(const ScalarField& f, int axis, int order) {
  ScalarField out(f.grid());
  apply_partial(f.grid(), f.data(), out.data(), 1, axis, order);
  return out;
}

VectorField partial_derivative(const VectorField& f, int axis, int order) {
  VectorField out(f.grid());
  apply_partial(f.grid(), f.data(), out.data(), f.grid().dim, axis, order);
  return out;
}

SymTensorField partial_derivative(const SymTensorField& f, int axis,
                                  int order) {
  SymTensorField out(f.grid());
  apply_partial(f.grid(), f.data(), out.data(), f.grid().sym_components(),
                axis, order);
  return out;
}

ScalarField second_partial(const ScalarField& f, int a, int b) {
  if (a == b) return partial_derivative(f, a, 2);
  return partial_derivative(partial_derivative(f, a, 1), b, 1);
}

}  // namespace rsl
