#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rsl/grid.hpp"

namespace rsl {

/// Per-node symmetric matrix snapshot in sym_index component order.
/// dim is 2 or 3; unused slots stay zero.
struct SymMat {
  int dim = 0;
  std::array<double, 6> v{};

  double operator()(int i, int j) const { return v[sym_index(i, j, dim)]; }
  double& operator()(int i, int j) { return v[sym_index(i, j, dim)]; }

  double det() const;
  SymMat inverse() const;          // throws std::domain_error if singular
  double min_eigenvalue() const;   // closed-form symmetric eigenvalue
  double max_eigenvalue() const;
  double trace_with(const SymMat& inv) const;  // inv^{ij} (*this)_{ij}
};

namespace detail {

/// Shared storage: one block of `components` doubles per node, node-major.
class FieldBase {
 public:
  const GridSpec& grid() const { return grid_; }
  int components() const { return ncomp_; }
  std::size_t size() const { return data_.size(); }
  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  double sup_norm() const;  // max over nodes and components of |value|
  void fill(double x);
  void scale(double a);

 protected:
  FieldBase(const GridSpec& g, int ncomp);
  void check_same_shape(const FieldBase& other) const;
  void add_scaled_impl(double a, const FieldBase& other);

  GridSpec grid_;
  int ncomp_;
  std::vector<double> data_;
};

}  // namespace detail

class ScalarField : public detail::FieldBase {
 public:
  explicit ScalarField(const GridSpec& g, double value = 0.0);

  double operator[](std::size_t node) const { return data_[node]; }
  double& operator[](std::size_t node) { return data_[node]; }

  void add_scaled(double a, const ScalarField& other) { add_scaled_impl(a, other); }
};

class VectorField : public detail::FieldBase {
 public:
  explicit VectorField(const GridSpec& g);

  double at(std::size_t node, int j) const { return data_[node * ncomp_ + j]; }
  double& at(std::size_t node, int j) { return data_[node * ncomp_ + j]; }

  void add_scaled(double a, const VectorField& other) { add_scaled_impl(a, other); }
};

class SymTensorField : public detail::FieldBase {
 public:
  explicit SymTensorField(const GridSpec& g);

  double at(std::size_t node, int c) const { return data_[node * ncomp_ + c]; }
  double& at(std::size_t node, int c) { return data_[node * ncomp_ + c]; }
  double at(std::size_t node, int i, int j) const {
    return data_[node * ncomp_ + sym_index(i, j, grid_.dim)];
  }
  double& at(std::size_t node, int i, int j) {
    return data_[node * ncomp_ + sym_index(i, j, grid_.dim)];
  }

  SymMat matrix_at(std::size_t node) const;
  void set_matrix_at(std::size_t node, const SymMat& m);

  void add_scaled(double a, const SymTensorField& other) { add_scaled_impl(a, other); }
};

/// Symmetric 2-tensor field that is pointwise positive definite.  Positivity
/// is enforced at the documented check points (construction from data, flow
/// steps), not per element write.
class MetricField : public SymTensorField {
 public:
  explicit MetricField(const GridSpec& g);

  /// Constant metric from entries in sym_index order.
  static MetricField constant(const GridSpec& g, const SymMat& value);
  static MetricField identity(const GridSpec& g);
  static MetricField from_tensor(const SymTensorField& t,
                                 double positivity_floor = kPositivityFloor);

  static constexpr double kPositivityFloor = 1e-8;

  double min_eigenvalue() const;  // over all nodes
  bool admissible(double floor = kPositivityFloor) const;
  void require_admissible(double floor = kPositivityFloor) const;  // throws

  /// Largest operator norm of g^{-1} over the grid (1 / min eigenvalue of g).
  double sup_inverse_norm() const;

  SymTensorField inverse_field() const;
  bool is_constant() const;  // bitwise-equal entries at every node
};

// difference / combination helpers (same grid enforced)
SymTensorField operator-(const SymTensorField& a, const SymTensorField& b);
SymTensorField operator+(const SymTensorField& a, const SymTensorField& b);
SymTensorField operator*(double a, const SymTensorField& h);

}  // namespace rsl
