#include "rsl/eigensolve.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace rsl {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void scale(std::span<double> a, double s) {
  for (double& x : a) x *= s;
}

void axpy(std::span<double> y, double a, std::span<const double> x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

}  // namespace

LobpcgResult lobpcg_smallest(std::size_t n, const ApplyFn& apply,
                             const ApplyFn& precond, std::vector<double>& x,
                             const LobpcgSettings& settings) {
  LobpcgResult res;
  if (norm(x) == 0.0) x.assign(n, 1.0);
  scale(x, 1.0 / norm(x));

  std::vector<double> ax(n), r(n), z(n), p(n), ap(n), az(n);
  bool have_p = false;

  apply(x, ax);
  double lambda = dot(x, ax);

  for (int it = 1; it <= settings.max_iterations; ++it) {
    res.iterations = it;
    for (std::size_t i = 0; i < n; ++i) r[i] = ax[i] - lambda * x[i];
    const double rn = norm(r);
    // the achievable residual floor scales with ||A||, not with lambda
    const double scale_ref =
        settings.scale_hint > 0.0
            ? settings.scale_hint
            : std::max({1.0, std::abs(lambda), norm(ax)});
    res.residual = rn;
    if (rn <= settings.tol * scale_ref) {
      res.converged = true;
      break;
    }

    precond(r, z);

    // Rayleigh-Ritz over span{x, z, p}
    std::vector<std::span<double>> basis;
    basis.emplace_back(x);
    basis.emplace_back(z);
    if (have_p) basis.emplace_back(p);

    // orthonormalize (modified Gram-Schmidt, drop near-dependent directions)
    std::vector<std::vector<double>> q;
    for (auto b : basis) {
      std::vector<double> v(b.begin(), b.end());
      for (const auto& u : q) axpy(v, -dot(v, u), u);
      for (const auto& u : q) axpy(v, -dot(v, u), u);
      const double vn = norm(v);
      if (vn > 1e-10) {
        scale(v, 1.0 / vn);
        q.push_back(std::move(v));
      }
    }
    const int m = static_cast<int>(q.size());
    Eigen::MatrixXd G(m, m);
    std::vector<std::vector<double>> aq(m, std::vector<double>(n));
    for (int i = 0; i < m; ++i) apply(q[i], aq[i]);
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) {
        G(i, j) = dot(q[i], aq[j]);
        G(j, i) = G(i, j);
      }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    const Eigen::VectorXd c = es.eigenvectors().col(0);
    lambda = es.eigenvalues()(0);

    // new iterate and conjugate direction (the z/p part of the update)
    std::vector<double> xn(n, 0.0), pn(n, 0.0);
    for (int i = 0; i < m; ++i) axpy(xn, c(i), q[i]);
    for (int i = 1; i < m; ++i) axpy(pn, c(i), q[i]);
    const double xnn = norm(xn);
    if (xnn == 0.0) break;
    scale(xn, 1.0 / xnn);
    x = std::move(xn);
    const double pnn = norm(pn);
    if (pnn > 1e-12) {
      scale(pn, 1.0 / pnn);
      p = std::move(pn);
      have_p = true;
    } else {
      have_p = false;
    }
    apply(x, ax);
    lambda = dot(x, ax);
    res.value = lambda;
  }
  res.value = lambda;
  return res;
}

namespace {

struct SeededVec {
  std::mt19937_64 rng;
  explicit SeededVec(std::uint64_t seed) : rng(seed) {}
  void fill(std::span<double> v) {
    for (double& x : v) {
      const double u =
          (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
      x = 2.0 * u - 1.0;
    }
  }
};

}  // namespace

LanczosResult lanczos_largest(std::size_t n, const ApplyFn& apply, int k,
                              const LanczosSettings& settings) {
  LanczosResult out;
  std::vector<RitzPair> locked;
  SeededVec seeder(settings.seed);

  auto deflate = [&](std::span<double> v) {
    for (const auto& l : locked) axpy(v, -dot(v, l.vector), l.vector);
  };

  auto kth_value = [&]() {
    return locked.size() >= static_cast<std::size_t>(k)
               ? locked[static_cast<std::size_t>(k) - 1].value
               : -std::numeric_limits<double>::infinity();
  };

  double op_scale = 1.0;  // running estimate of ||A|| for tolerance scaling

  for (int sweep = 1; sweep <= settings.max_sweeps; ++sweep) {
    out.sweeps = sweep;

    const int m = settings.max_basis;
    std::vector<std::vector<double>> V;
    V.reserve(m);
    std::vector<double> alpha, beta;

    std::vector<double> v(n);
    seeder.fill(v);
    if (settings.start_projector) settings.start_projector(v);
    const double raw_norm = norm(v);
    deflate(v);
    if (norm(v) < 1e-6 * std::max(raw_norm, 1e-300)) {
      // the reachable subspace is exhausted: everything in it is locked
      out.converged = true;
      break;
    }
    scale(v, 1.0 / norm(v));
    V.push_back(v);

    std::vector<double> w(n);
    for (int j = 0; j < m; ++j) {
      apply(V[j], w);
      ++out.applies;
      // keep the Krylov space inside the invariant subspace; rounding noise
      // in its huge complement otherwise surfaces as spurious zero modes
      if (settings.start_projector) settings.start_projector(w);
      deflate(w);
      const double a = dot(w, V[j]);
      alpha.push_back(a);
      axpy(w, -a, V[j]);
      if (j > 0) axpy(w, -beta[j - 1], V[j - 1]);
      // full reorthogonalization, twice, and against the locked pairs
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& u : V) axpy(w, -dot(w, u), u);
        deflate(w);
      }
      const double b = norm(w);
      op_scale = std::max({op_scale, std::abs(a), b});
      if (b < 1e-12 * op_scale || j == m - 1) {
        if (j < m - 1) beta.push_back(b);  // keep sizes consistent
        break;
      }
      beta.push_back(b);
      std::vector<double> next = w;
      scale(next, 1.0 / b);
      V.push_back(std::move(next));
    }

    const int jdim = static_cast<int>(alpha.size());
    if (jdim == 0) {
      out.converged = true;  // nothing left to explore
      break;
    }
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(jdim, jdim);
    for (int i = 0; i < jdim; ++i) {
      T(i, i) = alpha[i];
      if (i + 1 < jdim && i < static_cast<int>(beta.size())) {
        T(i, i + 1) = beta[i];
        T(i + 1, i) = beta[i];
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);

    // certify Ritz pairs from the algebraic top with true residuals
    const double cut_before = kth_value();
    int new_above_cut = 0;
    int newly_locked = 0;
    for (int idx = jdim - 1; idx >= 0; --idx) {
      const double theta = es.eigenvalues()(idx);
      std::vector<double> y(n, 0.0);
      for (int j = 0; j < jdim && j < static_cast<int>(V.size()); ++j)
        axpy(y, es.eigenvectors()(j, idx), V[j]);
      const double yn = norm(y);
      if (yn < 1e-10) continue;
      scale(y, 1.0 / yn);
      // drop candidates that are mostly a re-discovery of a locked direction
      // or mostly rounding junk outside the invariant subspace
      if (settings.start_projector) settings.start_projector(y);
      deflate(y);
      const double yn2 = norm(y);
      if (yn2 < 0.5) continue;
      scale(y, 1.0 / yn2);
      std::vector<double> ay(n);
      apply(y, ay);
      ++out.applies;
      deflate(ay);
      axpy(ay, -theta, y);
      const double resid = norm(ay);
      if (resid > settings.residual_tol * op_scale)
        break;  // lower Ritz values are converged even less
      if (theta > cut_before + settings.residual_tol * op_scale)
        ++new_above_cut;
      locked.push_back(RitzPair{theta, std::move(y), resid});
      ++newly_locked;
      if (newly_locked >= 2 * k) break;
    }

    std::sort(locked.begin(), locked.end(),
              [](const RitzPair& a, const RitzPair& b) {
                return a.value > b.value;
              });

    // stop after a sweep that uncovers nothing new above the k-th value:
    // the clusters at the top are exhausted
    if (static_cast<int>(locked.size()) >= k && new_above_cut == 0) {
      out.converged = true;
      break;
    }
  }

  if (static_cast<int>(locked.size()) < k) out.converged = false;

  out.op_scale = op_scale;
  out.pairs = std::move(locked);
  if (static_cast<int>(out.pairs.size()) > k + 8)
    out.pairs.resize(static_cast<std::size_t>(k + 8));
  return out;
}

}  // namespace rsl
