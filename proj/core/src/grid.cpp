#include "rsl/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rsl {

const char* to_string(DiffScheme s) {
  switch (s) {
    case DiffScheme::CentralO2: return "fd2";
    case DiffScheme::CentralO4: return "fd4";
    case DiffScheme::Spectral: return "spectral";
  }
  return "?";
}

DiffScheme diff_scheme_from_string(const std::string& s) {
  if (s == "fd2") return DiffScheme::CentralO2;
  if (s == "fd4") return DiffScheme::CentralO4;
  if (s == "spectral") return DiffScheme::Spectral;
  throw std::invalid_argument("unknown stencil '" + s + "' (fd2|fd4|spectral)");
}

GridSpec GridSpec::torus(int dim, int points_per_axis,
                         const std::vector<double>& side_lengths,
                         DiffScheme scheme) {
  GridSpec g;
  g.dim = dim;
  g.points_per_axis = points_per_axis;
  g.scheme = scheme;
  if (static_cast<int>(side_lengths.size()) != dim)
    throw std::invalid_argument("side_lengths must have one entry per axis");
  for (int a = 0; a < dim; ++a) g.side_lengths[a] = side_lengths[a];
  g.validate();
  return g;
}

GridSpec GridSpec::torus(int dim, int points_per_axis, double side_length,
                         DiffScheme scheme) {
  return torus(dim, points_per_axis,
               std::vector<double>(static_cast<std::size_t>(dim), side_length),
               scheme);
}

void GridSpec::validate() const {
  if (dim != 2 && dim != 3)
    throw std::invalid_argument("grid dim must be 2 or 3");
  if (points_per_axis < 8)
    throw std::invalid_argument("points_per_axis must be >= 8");
  for (int a = 0; a < dim; ++a) {
    if (!(side_lengths[a] > 0.0) || !std::isfinite(side_lengths[a]))
      throw std::invalid_argument("side lengths must be positive and finite");
  }
}

double GridSpec::spacing(int axis) const {
  if (axis < 0 || axis >= dim) throw std::invalid_argument("axis out of range");
  return side_lengths[axis] / points_per_axis;
}

double GridSpec::min_spacing() const {
  double m = spacing(0);
  for (int a = 1; a < dim; ++a) m = std::min(m, spacing(a));
  return m;
}

std::size_t GridSpec::node_count() const {
  std::size_t n = 1;
  for (int a = 0; a < dim; ++a) n *= static_cast<std::size_t>(points_per_axis);
  return n;
}

double GridSpec::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim; ++a) v *= spacing(a);
  return v;
}

bool GridSpec::compatible_with(const GridSpec& other) const {
  if (dim != other.dim || points_per_axis != other.points_per_axis ||
      scheme != other.scheme)
    return false;
  for (int a = 0; a < dim; ++a)
    if (side_lengths[a] != other.side_lengths[a]) return false;
  return true;
}

std::size_t GridSpec::node_index(const std::array<int, 3>& c) const {
  const int n = points_per_axis;
  std::size_t idx = 0;
  for (int a = dim - 1; a >= 0; --a) {
    int w = ((c[a] % n) + n) % n;  // periodic wrap
    idx = idx * n + static_cast<std::size_t>(w);
  }
  return idx;
}

std::array<int, 3> GridSpec::node_coords(std::size_t idx) const {
  std::array<int, 3> c{0, 0, 0};
  const int n = points_per_axis;
  for (int a = 0; a < dim; ++a) {
    c[a] = static_cast<int>(idx % n);
    idx /= n;
  }
  return c;
}

int sym_index(int i, int j, int dim) {
  if (i > j) std::swap(i, j);
  // row-start offsets for i<=j lexicographic order
  int off = 0;
  for (int r = 0; r < i; ++r) off += dim - r;
  return off + (j - i);
}

std::array<int, 2> sym_pair(int c, int dim) {
  for (int i = 0; i < dim; ++i) {
    int row = dim - i;
    if (c < row) return {i, i + c};
    c -= row;
  }
  throw std::invalid_argument("sym component index out of range");
}

}  // namespace rsl
