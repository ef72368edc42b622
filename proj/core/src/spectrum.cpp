#include "rsl/spectrum.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>

#include "rsl/curvature.hpp"
#include "rsl/decompose.hpp"
#include "rsl/eigensolve.hpp"
#include "rsl/inner.hpp"
#include "rsl/lambda.hpp"
#include "rsl/operators.hpp"

namespace rsl {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::LinearlyStable: return "LinearlyStable";
    case Verdict::Unstable: return "Unstable";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

namespace {

// per-node component Gram matrix of the weighted tensor inner product:
// <h,k>_x = sum g^{ip} g^{jq} h_ij k_pq over full index pairs
Eigen::MatrixXd component_gram(const SymMat& inv, int dim) {
  const int nsym = dim * (dim + 1) / 2;
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(nsym, nsym);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      for (int p = 0; p < dim; ++p)
        for (int q = 0; q < dim; ++q) {
          const int c = sym_index(i, j, dim);
          const int d = sym_index(p, q, dim);
          w(c, d) += inv(i, p) * inv(j, q);
        }
  return w;
}

struct WeightTransform {
  // per-node nsym-x-nsym factors: y = sqrtB h (plain coords), h = invSqrtB y
  std::vector<Eigen::MatrixXd> sqrtB, inv_sqrtB;
  bool uniform = false;  // constant metric: single factor reused

  void to_plain(const SymTensorField& h, std::vector<double>& y) const {
    const int nsym = static_cast<int>(sqrtB[0].rows());
    const std::size_t nodes = h.grid().node_count();
    y.resize(h.size());
    Eigen::VectorXd tmp(nsym), res(nsym);
    for (std::size_t n = 0; n < nodes; ++n) {
      const auto& m = uniform ? sqrtB[0] : sqrtB[n];
      for (int c = 0; c < nsym; ++c) tmp(c) = h.at(n, c);
      res = m * tmp;
      for (int c = 0; c < nsym; ++c) y[n * nsym + c] = res(c);
    }
  }

  void from_plain(std::span<const double> y, SymTensorField& h) const {
    const int nsym = static_cast<int>(sqrtB[0].rows());
    const std::size_t nodes = h.grid().node_count();
    Eigen::VectorXd tmp(nsym), res(nsym);
    for (std::size_t n = 0; n < nodes; ++n) {
      const auto& m = uniform ? inv_sqrtB[0] : inv_sqrtB[n];
      for (int c = 0; c < nsym; ++c) tmp(c) = y[n * nsym + c];
      res = m * tmp;
      for (int c = 0; c < nsym; ++c) h.at(n, c) = res(c);
    }
  }
};

WeightTransform make_weight_transform(const MetricField& g,
                                      const InnerProductWeight& w) {
  const GridSpec& grid = g.grid();
  const int dim = grid.dim;
  const std::size_t nodes = grid.node_count();
  WeightTransform t;
  t.uniform = g.is_constant();
  const std::size_t count = t.uniform ? 1 : nodes;
  t.sqrtB.reserve(count);
  t.inv_sqrtB.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    Eigen::MatrixXd B =
        w.dV[n] * component_gram(w.inv_metric.matrix_at(n), dim);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
    Eigen::VectorXd d = es.eigenvalues();
    Eigen::VectorXd dsqrt = d.cwiseSqrt();
    t.sqrtB.push_back(es.eigenvectors() * dsqrt.asDiagonal() *
                      es.eigenvectors().transpose());
    t.inv_sqrtB.push_back(es.eigenvectors() *
                          dsqrt.cwiseInverse().asDiagonal() *
                          es.eigenvectors().transpose());
  }
  return t;
}

}  // namespace

SpectralReport lichnerowicz_spectrum(const MetricField& g, int k,
                                     const SpectrumSettings& settings) {
  g.require_admissible();
  const GridSpec& grid = g.grid();
  const std::size_t dofs = g.grid().node_count() * grid.sym_components();

  SpectralReport rep{false,
                     0.0,
                     ScalarField(grid),
                     {},
                     0.0,
                     0,
                     Verdict::Inconclusive,
                     0.0,
                     settings.residual_tol,
                     0.0,
                     0,
                     0};

  if (settings.compute_lambda) {
    LambdaResult lam = lambda_of(g);
    rep.lambda_value = lam.value;
    rep.ground_state = lam.ground_state;
    if (!lam.converged) {
      rep.verdict = Verdict::Inconclusive;
      return rep;
    }
  }

  auto w = volume_weight(g);
  WeightTransform wt = make_weight_transform(g, w);

  const bool constant = g.is_constant();
  CurvaturePack pack = curvature_of(g);

  const bool project = settings.tt_project;
  if (project && !constant)
    throw std::domain_error("TT projection needs a constant background");
  DecomposeSettings dec;

  SymTensorField hbuf(grid), abuf(grid);
  auto apply = [&](std::span<const double> in, std::span<double> out) {
    wt.from_plain(in, hbuf);
    if (project) hbuf = decompose(hbuf, g, dec).n_part;
    abuf = lichnerowicz_apply(hbuf, g, pack, settings.curvature_term_factor);
    if (project) abuf = decompose(abuf, g, dec).n_part;
    std::vector<double> y;
    wt.to_plain(abuf, y);
    std::copy(y.begin(), y.end(), out.begin());
  };

  LanczosSettings ls;
  ls.max_basis = settings.max_basis;
  ls.max_sweeps = settings.max_sweeps;
  ls.residual_tol = settings.residual_tol;
  ls.seed = settings.seed;
  if (project) {
    ls.start_projector = [&](std::span<double> v) {
      wt.from_plain(v, hbuf);
      hbuf = decompose(hbuf, g, dec).n_part;
      std::vector<double> y;
      wt.to_plain(hbuf, y);
      std::copy(y.begin(), y.end(), v.begin());
    };
  }

  LanczosResult lz = lanczos_largest(dofs, apply, k, ls);
  rep.sweeps = lz.sweeps;
  rep.applies = lz.applies;
  rep.converged = lz.converged;
  rep.residual_threshold = settings.residual_tol * lz.op_scale;

  double scale = 1.0;
  for (const auto& p : lz.pairs) scale = std::max(scale, std::abs(p.value));
  rep.eig_tol_abs = settings.eig_tol_rel * scale;

  std::vector<double> abuf_plain(dofs);
  for (const auto& p : lz.pairs) {
    TensorEigenPair tp{p.value, SymTensorField(grid), p.residual, 0.0};
    wt.from_plain(p.vector, tp.field);
    // Rayleigh quotient of the quadratic form (vector is unit in plain coords)
    apply(p.vector, abuf_plain);
    double q = 0.0;
    for (std::size_t i = 0; i < dofs; ++i) q += abuf_plain[i] * p.vector[i];
    tp.rayleigh = q;
    rep.lichnerowicz_eigs.push_back(std::move(tp));
  }

  rep.kernel_dimension = 0;
  double gap = 0.0;
  bool have_nonzero = false;
  for (const auto& p : rep.lichnerowicz_eigs) {
    if (std::abs(p.value) <= rep.eig_tol_abs) {
      ++rep.kernel_dimension;
    } else if (!have_nonzero || std::abs(p.value) < gap) {
      gap = std::abs(p.value);
      have_nonzero = true;
    }
  }
  rep.gap_two_delta = have_nonzero ? gap : 0.0;

  // verdict: Unstable needs a certificate; the Rayleigh quotient of the
  // quadratic form certifies a positive eigenvalue of the symmetrized
  // operator exactly, and the residual-bounded eigenvalue certifies one of
  // the operator itself
  double max_rayleigh = -std::numeric_limits<double>::infinity();
  for (const auto& p : rep.lichnerowicz_eigs)
    max_rayleigh = std::max(max_rayleigh, p.rayleigh);
  bool certified_positive = max_rayleigh > rep.eig_tol_abs;
  for (const auto& p : rep.lichnerowicz_eigs)
    if (p.value > rep.eig_tol_abs && p.value - p.residual > rep.eig_tol_abs)
      certified_positive = true;
  if (certified_positive) {
    rep.verdict = Verdict::Unstable;
    return rep;
  }
  if (!lz.converged) {
    rep.verdict = Verdict::Inconclusive;
    return rep;
  }
  if (have_nonzero && gap >= 10.0 * rep.eig_tol_abs &&
      max_rayleigh <= rep.eig_tol_abs) {
    rep.verdict = Verdict::LinearlyStable;
  } else {
    rep.verdict = Verdict::Inconclusive;
  }
  return rep;
}

Verdict stability_verdict(const MetricField& g,
                          const SpectrumSettings& settings) {
  SpectrumSettings s = settings;
  s.tt_project = g.is_constant();
  SpectralReport rep = lichnerowicz_spectrum(g, s.k, s);
  return rep.verdict;
}

std::string report_to_json(const SpectralReport& r) {
  nlohmann::ordered_json j;
  j["converged"] = r.converged;
  j["lambda"] = r.lambda_value;
  nlohmann::ordered_json eigs = nlohmann::ordered_json::array();
  for (const auto& p : r.lichnerowicz_eigs) {
    eigs.push_back({{"value", p.value},
                    {"residual", p.residual},
                    {"rayleigh", p.rayleigh}});
  }
  j["lichnerowicz_eigs"] = eigs;
  j["gap_two_delta"] = r.gap_two_delta;
  j["kernel_dimension"] = r.kernel_dimension;
  j["verdict"] = to_string(r.verdict);
  j["tolerances"] = {{"eig_tol_abs", r.eig_tol_abs},
                     {"residual_tol", r.residual_tol},
                     {"residual_threshold", r.residual_threshold}};
  j["lanczos"] = {{"sweeps", r.sweeps}, {"applies", r.applies}};
  return j.dump(2);
}

}  // namespace rsl
