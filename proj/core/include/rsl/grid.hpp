#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace rsl {

/// Differentiation backend for the periodic torus calculus.
///
/// CentralO2 / CentralO4 are the classic centered stencils whose truncation
/// error is measurable against analytic oracles.  Spectral applies the exact
/// Fourier-multiplier derivative on resolved modes (first-derivative symbol
/// zeroed on the Nyquist mode), which makes the discrete operator algebra
/// close exactly on band-limited fields.
enum class DiffScheme { CentralO2, CentralO4, Spectral };

const char* to_string(DiffScheme s);
DiffScheme diff_scheme_from_string(const std::string& s);

/// Uniform periodic grid on the torus T^n, n in {2,3}, with N nodes per axis
/// and coordinate period L_a on axis a.  Node (i_0,..,i_{n-1}) sits at
/// x_a = i_a * L_a / N; indexing wraps on every axis.
///
/// Linear node order: axis 0 fastest, i.e. idx = i_0 + N*(i_1 + N*i_2).
struct GridSpec {
  int dim = 2;
  int points_per_axis = 8;
  std::array<double, 3> side_lengths{};
  DiffScheme scheme = DiffScheme::CentralO2;

  static GridSpec torus(int dim, int points_per_axis,
                        const std::vector<double>& side_lengths,
                        DiffScheme scheme = DiffScheme::CentralO2);
  /// Same side length on every axis.
  static GridSpec torus(int dim, int points_per_axis, double side_length,
                        DiffScheme scheme = DiffScheme::CentralO2);

  double spacing(int axis) const;
  double min_spacing() const;
  std::size_t node_count() const;
  int sym_components() const { return dim * (dim + 1) / 2; }
  double cell_volume() const;  // prod_a spacing(a)

  /// Structural compatibility: same dim, resolution, side lengths and scheme.
  bool compatible_with(const GridSpec& other) const;

  std::size_t node_index(const std::array<int, 3>& c) const;
  std::array<int, 3> node_coords(std::size_t idx) const;
  double coord(int axis, int i) const { return spacing(axis) * i; }

  void validate() const;  // throws std::invalid_argument on bad parameters
};

/// Flattened index of the unordered pair (i,j), i<=j lexicographic:
/// n=3: (0,0)=0 (0,1)=1 (0,2)=2 (1,1)=3 (1,2)=4 (2,2)=5.
int sym_index(int i, int j, int dim);
std::array<int, 2> sym_pair(int c, int dim);

}  // namespace rsl
