#include "rsl/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rsl {

double SymMat::det() const {
  const SymMat& m = *this;
  if (dim == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(0, 1);
  return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(1, 2)) -
         m(0, 1) * (m(0, 1) * m(2, 2) - m(1, 2) * m(0, 2)) +
         m(0, 2) * (m(0, 1) * m(1, 2) - m(1, 1) * m(0, 2));
}

SymMat SymMat::inverse() const {
  const SymMat& m = *this;
  const double d = det();
  if (d == 0.0) throw std::domain_error("singular symmetric matrix");
  SymMat r;
  r.dim = dim;
  if (dim == 2) {
    r(0, 0) = m(1, 1) / d;
    r(1, 1) = m(0, 0) / d;
    r(0, 1) = -m(0, 1) / d;
  } else {
    r(0, 0) = (m(1, 1) * m(2, 2) - m(1, 2) * m(1, 2)) / d;
    r(0, 1) = (m(0, 2) * m(1, 2) - m(0, 1) * m(2, 2)) / d;
    r(0, 2) = (m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1)) / d;
    r(1, 1) = (m(0, 0) * m(2, 2) - m(0, 2) * m(0, 2)) / d;
    r(1, 2) = (m(0, 1) * m(0, 2) - m(0, 0) * m(1, 2)) / d;
    r(2, 2) = (m(0, 0) * m(1, 1) - m(0, 1) * m(0, 1)) / d;
  }
  return r;
}

namespace {

// eigenvalues of a symmetric 3x3 by the trigonometric method; returns sorted
// ascending
std::array<double, 3> sym3_eigenvalues(const SymMat& m) {
  const double a11 = m(0, 0), a22 = m(1, 1), a33 = m(2, 2);
  const double a12 = m(0, 1), a13 = m(0, 2), a23 = m(1, 2);
  const double p1 = a12 * a12 + a13 * a13 + a23 * a23;
  if (p1 == 0.0) {
    std::array<double, 3> e{a11, a22, a33};
    std::sort(e.begin(), e.end());
    return e;
  }
  const double q = (a11 + a22 + a33) / 3.0;
  const double p2 = (a11 - q) * (a11 - q) + (a22 - q) * (a22 - q) +
                    (a33 - q) * (a33 - q) + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  SymMat b = m;
  b(0, 0) -= q;
  b(1, 1) -= q;
  b(2, 2) -= q;
  for (double& x : b.v) x /= p;
  double r = b.det() / 2.0;
  r = std::clamp(r, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double e1 = q + 2.0 * p * std::cos(phi);
  const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
  const double e2 = 3.0 * q - e1 - e3;
  std::array<double, 3> e{e3, e2, e1};
  std::sort(e.begin(), e.end());
  return e;
}

}  // namespace

double SymMat::min_eigenvalue() const {
  const SymMat& m = *this;
  if (dim == 2) {
    const double h = 0.5 * (m(0, 0) + m(1, 1));
    const double d = 0.5 * (m(0, 0) - m(1, 1));
    return h - std::sqrt(d * d + m(0, 1) * m(0, 1));
  }
  return sym3_eigenvalues(m)[0];
}

double SymMat::max_eigenvalue() const {
  const SymMat& m = *this;
  if (dim == 2) {
    const double h = 0.5 * (m(0, 0) + m(1, 1));
    const double d = 0.5 * (m(0, 0) - m(1, 1));
    return h + std::sqrt(d * d + m(0, 1) * m(0, 1));
  }
  return sym3_eigenvalues(m)[2];
}

double SymMat::trace_with(const SymMat& inv) const {
  double t = 0.0;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) t += inv(i, j) * (*this)(i, j);
  return t;
}

namespace detail {

FieldBase::FieldBase(const GridSpec& g, int ncomp)
    : grid_(g), ncomp_(ncomp), data_(g.node_count() * ncomp, 0.0) {
  grid_.validate();
}

double FieldBase::sup_norm() const {
  double m = 0.0;
  for (double x : data_) m = std::max(m, std::abs(x));
  return m;
}

void FieldBase::fill(double x) { std::fill(data_.begin(), data_.end(), x); }

void FieldBase::scale(double a) {
  for (double& x : data_) x *= a;
}

void FieldBase::check_same_shape(const FieldBase& other) const {
  if (!grid_.compatible_with(other.grid_))
    throw std::invalid_argument("field grids are incompatible");
  if (ncomp_ != other.ncomp_)
    throw std::invalid_argument("field ranks differ");
}

void FieldBase::add_scaled_impl(double a, const FieldBase& other) {
  check_same_shape(other);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += a * other.data_[i];
}

}  // namespace detail

ScalarField::ScalarField(const GridSpec& g, double value)
    : detail::FieldBase(g, 1) {
  if (value != 0.0) fill(value);
}

VectorField::VectorField(const GridSpec& g) : detail::FieldBase(g, g.dim) {}

SymTensorField::SymTensorField(const GridSpec& g)
    : detail::FieldBase(g, g.sym_components()) {}

SymMat SymTensorField::matrix_at(std::size_t node) const {
  SymMat m;
  m.dim = grid_.dim;
  for (int c = 0; c < ncomp_; ++c) m.v[c] = data_[node * ncomp_ + c];
  return m;
}

void SymTensorField::set_matrix_at(std::size_t node, const SymMat& m) {
  for (int c = 0; c < ncomp_; ++c) data_[node * ncomp_ + c] = m.v[c];
}

MetricField::MetricField(const GridSpec& g) : SymTensorField(g) {}

MetricField MetricField::constant(const GridSpec& g, const SymMat& value) {
  MetricField m(g);
  const std::size_t nodes = g.node_count();
  for (std::size_t n = 0; n < nodes; ++n) m.set_matrix_at(n, value);
  m.require_admissible();
  return m;
}

MetricField MetricField::identity(const GridSpec& g) {
  SymMat id;
  id.dim = g.dim;
  for (int i = 0; i < g.dim; ++i) id(i, i) = 1.0;
  return constant(g, id);
}

MetricField MetricField::from_tensor(const SymTensorField& t,
                                     double positivity_floor) {
  MetricField m(t.grid());
  std::copy(t.data().begin(), t.data().end(), m.data().begin());
  m.require_admissible(positivity_floor);
  return m;
}

double MetricField::min_eigenvalue() const {
  const std::size_t nodes = grid_.node_count();
  double m = matrix_at(0).min_eigenvalue();
  for (std::size_t n = 1; n < nodes; ++n)
    m = std::min(m, matrix_at(n).min_eigenvalue());
  return m;
}

bool MetricField::admissible(double floor) const {
  const std::size_t nodes = grid_.node_count();
  for (std::size_t n = 0; n < nodes; ++n) {
    const double e = matrix_at(n).min_eigenvalue();
    if (!(e > floor) || !std::isfinite(e)) return false;
  }
  return true;
}

void MetricField::require_admissible(double floor) const {
  if (!admissible(floor))
    throw std::domain_error("metric is not positive definite above the floor");
}

double MetricField::sup_inverse_norm() const {
  return 1.0 / min_eigenvalue();
}

SymTensorField MetricField::inverse_field() const {
  SymTensorField inv(grid_);
  const std::size_t nodes = grid_.node_count();
  for (std::size_t n = 0; n < nodes; ++n)
    inv.set_matrix_at(n, matrix_at(n).inverse());
  return inv;
}

bool MetricField::is_constant() const {
  const std::size_t nodes = grid_.node_count();
  for (std::size_t n = 1; n < nodes; ++n)
    for (int c = 0; c < ncomp_; ++c)
      if (data_[n * ncomp_ + c] != data_[c]) return false;
  return true;
}

SymTensorField operator-(const SymTensorField& a, const SymTensorField& b) {
  SymTensorField r = a;
  r.add_scaled(-1.0, b);
  return r;
}

SymTensorField operator+(const SymTensorField& a, const SymTensorField& b) {
  SymTensorField r = a;
  r.add_scaled(1.0, b);
  return r;
}

SymTensorField operator*(double a, const SymTensorField& h) {
  SymTensorField r = h;
  r.scale(a);
  return r;
}

}  // namespace rsl
