#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rsl/field.hpp"

namespace rsl {

enum class Verdict { LinearlyStable, Unstable, Inconclusive };
const char* to_string(Verdict v);

struct SpectrumSettings {
  int k = 10;                  // eigenpairs to resolve
  int max_basis = 120;
  int max_sweeps = 40;
  double eig_tol_rel = 1e-6;   // zero-mode threshold relative to gap scale
  double residual_tol = 1e-8;
  std::uint64_t seed = 2024;
  bool compute_lambda = true;
  bool tt_project = false;     // restrict to N via decompose (constant g only)
  /// Coefficient of the curvature action in the operator; the physical value
  /// is +2.  The sign-flipped value -2 is a test hook that manufactures a
  /// positive eigenvalue on curved metrics.
  double curvature_term_factor = 2.0;
};

struct TensorEigenPair {
  double value = 0.0;
  SymTensorField field;
  double residual = 0.0;  // ||A h - value h|| / ||h|| in the weighted norm
  /// <A h, h> / <h, h>: an exact certificate for the quadratic form (the
  /// object the stability definition is about), unaffected by the
  /// self-adjointness defect of curved-background discretizations.
  double rayleigh = 0.0;
};

struct SpectralReport {
  bool converged = false;
  double lambda_value = 0.0;
  ScalarField ground_state;
  std::vector<TensorEigenPair> lichnerowicz_eigs;  // sorted descending
  double gap_two_delta = 0.0;  // min |value| over resolved nonzero eigenvalues
  int kernel_dimension = 0;    // count of |value| <= eig_tol_abs
  Verdict verdict = Verdict::Inconclusive;
  double eig_tol_abs = 0.0;    // echoed effective tolerances
  double residual_tol = 0.0;
  double residual_threshold = 0.0;  // absolute bound the locked pairs satisfy
  int sweeps = 0;
  int applies = 0;
};

/// The k algebraically largest eigenpairs of the Lichnerowicz operator at g,
/// by matrix-free Lanczos in the dV_g-weighted tensor inner product (full
/// reorthogonalization; restart policy documented at lanczos_largest).
/// Also carries lambda(g) and its ground state.
SpectralReport lichnerowicz_spectrum(const MetricField& g, int k,
                                     const SpectrumSettings& settings = {});

/// Linear-stability verdict: Unstable only on a residual-certified positive
/// eigenvalue; LinearlyStable needs the zero cluster cleanly separated from
/// the first nonzero one; anything murkier is Inconclusive.  On constant
/// backgrounds the operator is restricted to the TT sector via decompose.
Verdict stability_verdict(const MetricField& g,
                          const SpectrumSettings& settings = {});

/// JSON-shaped report with all tolerances echoed (eigenfields are dumped
/// separately as snapshots when requested).
std::string report_to_json(const SpectralReport& r);

}  // namespace rsl
