#include "rsl/poisson.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "rsl/fd.hpp"
#include "rsl/operators.hpp"
#include "spectral_engine.hpp"

namespace rsl {

namespace {

// first-derivative symbol of the grid's scheme on integer wavenumber k
double deriv_symbol(const GridSpec& g, int axis, int k) {
  const int n = g.points_per_axis;
  const double theta = 2.0 * M_PI * k / g.side_lengths[axis];
  const double phi = 2.0 * M_PI * k / n;  // theta * dx
  switch (g.scheme) {
    case DiffScheme::Spectral:
      if (n % 2 == 0 && std::abs(k) == n / 2) return 0.0;
      return theta;
    case DiffScheme::CentralO2:
      return std::sin(phi) / g.spacing(axis);
    case DiffScheme::CentralO4:
      return (8.0 * std::sin(phi) - std::sin(2.0 * phi)) /
             (6.0 * g.spacing(axis));
  }
  return 0.0;
}

SymMat mean_metric(const MetricField& g) {
  SymMat m;
  m.dim = g.grid().dim;
  const std::size_t nodes = g.grid().node_count();
  for (int c = 0; c < g.components(); ++c) {
    double s = 0.0;
    for (std::size_t n = 0; n < nodes; ++n) s += g.at(n, c);
    m.v[c] = s / static_cast<double>(nodes);
  }
  return m;
}

// quadratic symbol q(k) = gbar^{ab} s_a s_b of the scheme's product Laplacian
std::function<double(const std::array<int, 3>&)> laplace_symbol(
    const GridSpec& grid, const SymMat& gbar_inv) {
  return [grid, gbar_inv](const std::array<int, 3>& k) {
    double q = 0.0;
    for (int a = 0; a < grid.dim; ++a)
      for (int b = 0; b < grid.dim; ++b)
        q += gbar_inv(a, b) * deriv_symbol(grid, a, k[a]) *
             deriv_symbol(grid, b, k[b]);
    return q;
  };
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// The product-form elliptic operators are blind to modes where the
// first-derivative symbol vanishes on every axis path (k = 0 and the Nyquist
// sector); right-hand sides are projected onto the operator range so the CG
// system stays consistent.  The projected-out content is not representable
// by the solve and is accounted for by the callers.
void project_onto_range(const GridSpec& grid,
                        const std::function<double(const std::array<int, 3>&)>& q,
                        std::span<double> field) {
  SpectralEngine& eng = SpectralEngine::instance(grid);
  std::vector<double> tmp(field.size());
  eng.apply_multiplier(field, tmp, [&](const std::array<int, 3>& k) {
    return q(k) > 1e-14 ? 1.0 : 0.0;
  });
  std::copy(tmp.begin(), tmp.end(), field.begin());
}

// preconditioned conjugate gradient on a plain-SPD operator
CgResult pcg(std::size_t n, const std::function<void(std::span<const double>,
                                                     std::span<double>)>& K,
             const std::function<void(std::span<const double>,
                                      std::span<double>)>& M,
             std::span<const double> b, std::span<double> x,
             const CgSettings& settings) {
  CgResult res;
  std::fill(x.begin(), x.end(), 0.0);
  const double bnorm = std::sqrt(dot(b, b));
  if (bnorm == 0.0) {
    res.converged = true;
    return res;
  }
  std::vector<double> r(b.begin(), b.end()), z(n), p(n), kp(n);
  M(r, z);
  p = z;
  double rz = dot(r, z);
  for (int it = 1; it <= settings.max_iterations; ++it) {
    K(p, kp);
    const double pkp = dot(p, kp);
    if (!(pkp > 0.0)) break;  // left the SPD cone; report non-convergence
    const double alpha = rz / pkp;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * kp[i];
    }
    res.iterations = it;
    res.residual = std::sqrt(dot(r, r)) / bnorm;
    if (res.residual <= settings.tol) {
      res.converged = true;
      return res;
    }
    M(r, z);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  return res;
}

}  // namespace

CgResult solve_poisson(const MetricField& g, const InnerProductWeight& w,
                       const ScalarField& rhs, ScalarField& v,
                       const CgSettings& settings) {
  const GridSpec& grid = g.grid();
  if (!grid.compatible_with(rhs.grid()) || !grid.compatible_with(v.grid()))
    throw std::invalid_argument("poisson solve: incompatible grids");
  const int dim = grid.dim;
  const std::size_t nodes = grid.node_count();

  // weak-form SPD operator K v = -sum_a D_a(dV g^{ab} D_b v) = -dV Lap_g v
  auto K = [&](std::span<const double> in, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    std::vector<std::vector<double>> db(dim, std::vector<double>(nodes));
    for (int b = 0; b < dim; ++b) apply_partial(grid, in, db[b], 1, b, 1);
    std::vector<double> flux(nodes), dflux(nodes);
    for (int a = 0; a < dim; ++a) {
      for (std::size_t x = 0; x < nodes; ++x) {
        const SymMat gi = w.inv_metric.matrix_at(x);
        double s = 0.0;
        for (int b = 0; b < dim; ++b) s += gi(a, b) * db[b][x];
        flux[x] = w.dV[x] * s;
      }
      apply_partial(grid, flux, dflux, 1, a, 1);
      for (std::size_t x = 0; x < nodes; ++x) out[x] -= dflux[x];
    }
  };

  // FFT preconditioner from the mean metric; exact inverse when g is constant
  const SymMat gbar_inv = mean_metric(g).inverse();
  const double dv_mean = w.total / static_cast<double>(nodes);
  auto q = laplace_symbol(grid, gbar_inv);
  SpectralEngine& eng = SpectralEngine::instance(grid);
  auto M = [&](std::span<const double> in, std::span<double> out) {
    eng.apply_multiplier(in, out, [&](const std::array<int, 3>& k) {
      const double qq = q(k);
      return qq > 1e-14 ? 1.0 / (dv_mean * qq) : 0.0;
    });
  };

  // b = -dV (rhs - mean_w rhs), projected onto the operator range
  const double mu = mean(rhs, w);
  std::vector<double> b(nodes);
  for (std::size_t x = 0; x < nodes; ++x) b[x] = -w.dV[x] * (rhs[x] - mu);
  project_onto_range(grid, q, b);

  CgResult res = pcg(nodes, K, M, b, v.data(), settings);

  const double vbar = mean(v, w);
  for (std::size_t x = 0; x < nodes; ++x) v[x] -= vbar;
  return res;
}

CgResult solve_gauge(const MetricField& g, const InnerProductWeight& w,
                     const VectorField& rhs, VectorField& X,
                     const CgSettings& settings) {
  const GridSpec& grid = g.grid();
  if (!g.is_constant())
    throw std::domain_error(
        "gauge solve is defined on constant (flat) backgrounds");
  const int dim = grid.dim;
  const std::size_t nodes = grid.node_count();
  const std::size_t n = nodes * dim;

  auto K = [&](std::span<const double> in, std::span<double> out) {
    VectorField xin(grid);
    std::copy(in.begin(), in.end(), xin.data().begin());
    VectorField axi = divergence(div_adjoint(xin, g), g);
    for (std::size_t i = 0; i < n; ++i) out[i] = -axi.data()[i];
  };

  const SymMat gbar_inv = mean_metric(g).inverse();
  auto q = laplace_symbol(grid, gbar_inv);
  SpectralEngine& eng = SpectralEngine::instance(grid);
  std::vector<double> comp_in(nodes), comp_out(nodes);
  auto M = [&](std::span<const double> in, std::span<double> out) {
    for (int c = 0; c < dim; ++c) {
      for (std::size_t x = 0; x < nodes; ++x) comp_in[x] = in[x * dim + c];
      eng.apply_multiplier(comp_in, comp_out, [&](const std::array<int, 3>& k) {
        const double qq = q(k);
        return qq > 1e-14 ? 2.0 / qq : 0.0;
      });
      for (std::size_t x = 0; x < nodes; ++x) out[x * dim + c] = comp_out[x];
    }
  };

  // project the per-component mean out of the rhs (kernel = parallel fields)
  // and restrict to the representable range
  std::vector<double> b(n);
  std::vector<double> comp_b(nodes);
  for (int c = 0; c < dim; ++c) {
    double mu = 0.0;
    for (std::size_t x = 0; x < nodes; ++x) mu += rhs.at(x, c);
    mu /= static_cast<double>(nodes);
    for (std::size_t x = 0; x < nodes; ++x) comp_b[x] = -(rhs.at(x, c) - mu);
    project_onto_range(grid, q, comp_b);
    for (std::size_t x = 0; x < nodes; ++x) b[x * dim + c] = comp_b[x];
  }

  CgResult res = pcg(n, K, M, b, X.data(), settings);

  for (int c = 0; c < dim; ++c) {
    double mu = 0.0;
    for (std::size_t x = 0; x < nodes; ++x) mu += X.at(x, c);
    mu /= static_cast<double>(nodes);
    for (std::size_t x = 0; x < nodes; ++x) X.at(x, c) -= mu;
  }
  (void)w;
  return res;
}

}  // namespace rsl
