#include "rsl/lambda.hpp"

#include <cmath>
#include <stdexcept>

#include "rsl/eigensolve.hpp"
#include "rsl/fd.hpp"
#include "rsl/operators.hpp"
#include "spectral_engine.hpp"

namespace rsl {

double perelman_F(const MetricField& g, const ScalarField& f,
                  const InnerProductWeight& w, const ScalarField& scalar_curv) {
  const GridSpec& grid = g.grid();
  if (!grid.compatible_with(f.grid()))
    throw std::invalid_argument("perelman_F: incompatible grids");
  const int dim = grid.dim;
  const std::size_t nodes = grid.node_count();

  std::vector<ScalarField> df;
  df.reserve(dim);
  for (int a = 0; a < dim; ++a) df.push_back(partial_derivative(f, a, 1));

  double total = 0.0;
  for (std::size_t n = 0; n < nodes; ++n) {
    const SymMat gi = w.inv_metric.matrix_at(n);
    double grad2 = 0.0;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) grad2 += gi(i, j) * df[i][n] * df[j][n];
    total += w.dV[n] * std::exp(-f[n]) * (grad2 + scalar_curv[n]);
  }
  return total;
}

double perelman_F(const MetricField& g, const ScalarField& f) {
  g.require_admissible();
  auto w = volume_weight(g);
  if (g.is_constant()) {
    ScalarField zero(g.grid());
    return perelman_F(g, f, w, zero);
  }
  RicciPack pack = ricci_of(g);
  return perelman_F(g, f, w, pack.scalar);
}

namespace {

// first-derivative symbol, matching poisson.cpp's preconditioner
double deriv_symbol(const GridSpec& g, int axis, int k) {
  const int n = g.points_per_axis;
  const double theta = 2.0 * M_PI * k / g.side_lengths[axis];
  const double phi = 2.0 * M_PI * k / n;
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

}  // namespace

LambdaResult lambda_of(const MetricField& g, const LambdaSettings& settings,
                       const ScalarField* warm_start) {
  g.require_admissible();
  const GridSpec& grid = g.grid();
  const int dim = grid.dim;
  const std::size_t nodes = grid.node_count();

  auto w = volume_weight(g);
  ScalarField scalar_curv(grid);
  if (!g.is_constant()) {
    RicciPack pack = ricci_of(g);
    scalar_curv = std::move(pack.scalar);
  }

  // Schrodinger operator in the W = diag(dV) inner product:
  //   A u = (1/dV) K u,  K u = 4 sum_ab D_a^T( dV g^{ab} D_b u ) + dV R u.
  // Plain-symmetrized via s = sqrt(dV):  At = S K S with S = diag(1/s),
  // so At is symmetric in the ordinary dot product and shares eigenvalues
  // with A; eigenvectors map back by u = v / s.
  std::vector<double> s(nodes), sinv(nodes);
  for (std::size_t x = 0; x < nodes; ++x) {
    s[x] = std::sqrt(w.dV[x]);
    sinv[x] = 1.0 / s[x];
  }

  auto apply = [&](std::span<const double> in, std::span<double> out) {
    std::vector<double> u(nodes);
    for (std::size_t x = 0; x < nodes; ++x) u[x] = in[x] * sinv[x];
    std::vector<std::vector<double>> du(dim, std::vector<double>(nodes));
    for (int b = 0; b < dim; ++b) apply_partial(grid, u, du[b], 1, b, 1);
    std::vector<double> acc(nodes, 0.0), flux(nodes), dflux(nodes);
    for (int a = 0; a < dim; ++a) {
      for (std::size_t x = 0; x < nodes; ++x) {
        const SymMat gi = w.inv_metric.matrix_at(x);
        double t = 0.0;
        for (int b = 0; b < dim; ++b) t += gi(a, b) * du[b][x];
        flux[x] = w.dV[x] * t;
      }
      apply_partial(grid, flux, dflux, 1, a, 1);
      // D^T = -D for every scheme here
      for (std::size_t x = 0; x < nodes; ++x) acc[x] -= dflux[x];
    }
    for (std::size_t x = 0; x < nodes; ++x)
      out[x] = (4.0 * acc[x] + w.dV[x] * scalar_curv[x] * u[x]) * sinv[x];
  };

  // FFT preconditioner: inverse of the flat-average (4 q(k) + shift)
  SymMat gbar;
  gbar.dim = dim;
  for (int c = 0; c < g.components(); ++c) {
    double m = 0.0;
    for (std::size_t x = 0; x < nodes; ++x) m += g.at(x, c);
    gbar.v[c] = m / static_cast<double>(nodes);
  }
  const SymMat gbar_inv = gbar.inverse();
  SpectralEngine& eng = SpectralEngine::instance(grid);
  double rbar = 0.0;
  for (std::size_t x = 0; x < nodes; ++x) rbar += scalar_curv[x];
  rbar /= static_cast<double>(nodes);
  const double shift = std::max(1.0, std::abs(rbar));
  auto precond = [&](std::span<const double> in, std::span<double> out) {
    eng.apply_multiplier(in, out, [&](const std::array<int, 3>& k) {
      double q = 0.0;
      for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b)
          q += gbar_inv(a, b) * deriv_symbol(grid, a, k[a]) *
               deriv_symbol(grid, b, k[b]);
      return 1.0 / (4.0 * q + shift);
    });
  };

  std::vector<double> x(nodes, 1.0);
  if (warm_start) {
    for (std::size_t i = 0; i < nodes; ++i) x[i] = (*warm_start)[i] * s[i];
  } else {
    for (std::size_t i = 0; i < nodes; ++i) x[i] = s[i];  // u = 1 start
  }

  LobpcgSettings ls;
  ls.tol = settings.tol;
  ls.max_iterations = settings.max_iterations;
  // spectral-scale estimate ||A|| ~ 4 |gbar^-1| sum_a max_k s_a(k)^2 + |R|_inf
  double qsum = 0.0;
  for (int a = 0; a < dim; ++a) {
    double smax = 0.0;
    for (int k = 0; k <= grid.points_per_axis / 2; ++k)
      smax = std::max(smax, std::abs(deriv_symbol(grid, a, k)));
    qsum += smax * smax;
  }
  ls.scale_hint = 4.0 * gbar_inv.max_eigenvalue() * qsum +
                  std::max(1.0, scalar_curv.sup_norm());
  LobpcgResult lr = lobpcg_smallest(nodes, apply, precond, x, ls);

  LambdaResult res{false,          lr.value, ScalarField(grid),
                   ScalarField(grid), 0.0,      lr.iterations,
                   lr.residual};
  res.converged = lr.converged;

  // map back, normalize <u,u>_dV = 1, orient positive
  ScalarField u(grid);
  for (std::size_t i = 0; i < nodes; ++i) u[i] = x[i] * sinv[i];
  const double nu = l2_norm(u, w);
  double sign_sum = 0.0;
  for (std::size_t i = 0; i < nodes; ++i) sign_sum += u[i] * w.dV[i];
  const double orient = sign_sum < 0.0 ? -1.0 : 1.0;
  for (std::size_t i = 0; i < nodes; ++i) u[i] *= orient / nu;

  bool positive = true;
  for (std::size_t i = 0; i < nodes; ++i)
    if (!(u[i] > 0.0)) positive = false;
  if (!positive) res.converged = false;  // ground state must be positive

  res.ground_state = u;
  if (positive) {
    for (std::size_t i = 0; i < nodes; ++i) res.f[i] = -2.0 * std::log(u[i]);
    if (settings.check_consistency) {
      const double Fval = perelman_F(g, res.f, w, scalar_curv);
      res.consistency_gap = std::abs(Fval - res.value);
    }
  }
  return res;
}

double first_variation_lambda(const MetricField& g, const SymTensorField& h,
                              const LambdaResult& lam) {
  if (!lam.converged)
    throw std::runtime_error(
        "first_variation_lambda: lambda eigensolve did not converge");
  const GridSpec& grid = g.grid();
  const int dim = grid.dim;
  const std::size_t nodes = grid.node_count();
  auto w = volume_weight(g);

  SymTensorField variation(grid);  // -Ric - Hess f
  if (g.is_constant()) {
    // Ric = 0 and f is constant, so the integrand vanishes identically;
    // keep the exact zero rather than differentiating log of a constant
    const double fmax = lam.f.sup_norm();
    ScalarField fshift = lam.f;
    double fmean = 0.0;
    for (std::size_t n = 0; n < nodes; ++n) fmean += fshift[n];
    fmean /= static_cast<double>(nodes);
    bool f_constant = true;
    for (std::size_t n = 0; n < nodes; ++n)
      if (std::abs(fshift[n] - fmean) > 1e-13 * std::max(1.0, fmax))
        f_constant = false;
    if (f_constant) return 0.0;
    variation = hessian(lam.f, g);
    variation.scale(-1.0);
  } else {
    RicciPack pack = ricci_of(g);
    variation = hessian(lam.f, g, pack.christoffel);
    variation.add_scaled(1.0, pack.ricci);
    variation.scale(-1.0);
  }

  double total = 0.0;
  for (std::size_t n = 0; n < nodes; ++n) {
    const SymMat gi = w.inv_metric.matrix_at(n);
    const SymMat vm = variation.matrix_at(n);
    const SymMat hm = h.matrix_at(n);
    double p = 0.0;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        for (int a = 0; a < dim; ++a)
          for (int b = 0; b < dim; ++b)
            p += gi(i, a) * gi(j, b) * vm(i, j) * hm(a, b);
    const double u = lam.ground_state[n];
    total += w.dV[n] * u * u * p;
  }
  return total;
}

double first_variation_lambda(const MetricField& g, const SymTensorField& h) {
  LambdaResult lam = lambda_of(g);
  return first_variation_lambda(g, h, lam);
}

}  // namespace rsl
