#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace rsl {

using ApplyFn = std::function<void(std::span<const double>, std::span<double>)>;

struct LobpcgSettings {
  double tol = 1e-11;       // residual tolerance relative to the operator scale
  int max_iterations = 300;
  /// Estimate of ||A||; the convergence test is ||r|| <= tol * scale.  When
  /// zero, max(1, |value|, ||A x||) is used, which underestimates the scale
  /// for operators with a large spread.
  double scale_hint = 0.0;
};

struct LobpcgResult {
  bool converged = false;
  double value = 0.0;
  int iterations = 0;
  double residual = 0.0;
};

/// Smallest eigenpair of a (plain-Euclidean) symmetric operator by
/// single-vector LOBPCG with an SPD preconditioner.  `x` holds the start
/// vector on entry (warm starts) and the eigenvector on exit.
LobpcgResult lobpcg_smallest(std::size_t n, const ApplyFn& apply,
                             const ApplyFn& precond, std::vector<double>& x,
                             const LobpcgSettings& settings = {});

struct LanczosSettings {
  int max_basis = 120;        // Krylov dimension per sweep
  int max_sweeps = 40;
  double residual_tol = 1e-8; // certification threshold for locked pairs
  std::uint64_t seed = 1234;
  /// Applied to every fresh start vector (e.g. projection onto an invariant
  /// subspace when the operator is P A P and eigenpairs outside im P are not
  /// wanted).  Identity when empty.
  std::function<void(std::span<double>)> start_projector;
};

struct RitzPair {
  double value = 0.0;
  std::vector<double> vector;
  double residual = 0.0;
};

struct LanczosResult {
  bool converged = false;
  std::vector<RitzPair> pairs;  // sorted algebraically descending
  int sweeps = 0;
  int applies = 0;
  double op_scale = 1.0;  // scale used in the residual certification
};

/// k algebraically largest eigenpairs of a symmetric operator by Lanczos with
/// full reorthogonalization.  Restart policy: each sweep builds a fresh
/// Krylov space from a seeded random start deflated against all locked
/// (converged, residual-certified) pairs; converged Ritz pairs lock at the
/// end of the sweep.  Sweeps continue past k pairs until one full sweep
/// uncovers nothing new above the k-th locked value, which is how degenerate
/// clusters are exhausted.
LanczosResult lanczos_largest(std::size_t n, const ApplyFn& apply, int k,
                              const LanczosSettings& settings = {});

}  // namespace rsl
