#pragma once

#include "spikecov/matrix_core.hpp"
#include "spikecov/posterior.hpp"

namespace spikecov {

/// Sample-side quantities shared by both eigenvalue corrections.
/// Spike indices in this module are 1-based (k = 1..K).
struct CorrectionContext {
  Vector s_eigs;      // descending eigenvalues of S
  Vector splus_eigs;  // descending eigenvalues of S + A/n
  int n = 0;
  int p = 0;
  int k_spikes = 0;
  double c_hat = 0.0;

  /// ĉ = 0: the bulk carries no variance and both corrections are trivial.
  bool bulk_degenerate() const { return !(c_hat > 0.0); }
  /// Σ_{l>K} λ_l(S + A/n).
  double splus_bulk_sum() const;
};

CorrectionContext make_correction_context(Vector s_eigs, Vector splus_eigs, int n, int k_spikes);

/// Computes both spectra; A = a·I takes a shift instead of a second
/// eigendecomposition.
CorrectionContext make_correction_context(const SymMatrix& s, const SymMatrix& a, int n,
                                          int k_spikes);

/// Bulk level ĉ = Σ_{j>K} λ_j(S) / (p − K − pK/n).
double hat_c(const Vector& s_eigs, int n, int p, int k_spikes);

/// Prior degrees of freedom that centers the k-th posterior eigenvalue on
/// the debiased sample eigenvalue: the root of γ̃₁(ν) = γ₂.
double calibrate_nu(const CorrectionContext& ctx, int k);

/// Inflation of the k-th posterior eigenvalue relative to λ_k(S).
double gamma1_tilde(const CorrectionContext& ctx, double nu, int k);

/// Shrinkage of λ_k(S) toward λ_k(Σ₀): 1 − ĉp/(nλ_k(S)).
double gamma2(double lambda_k_s, double c_hat, int n, int p);

/// γ₂/γ̃₁ for k = 1..K. Throws CorrectionInfeasible listing every index
/// whose factor is not positive.
Vector posthoc_factors(const CorrectionContext& ctx, double nu);

/// Multiplies draw column k by γ₂/γ̃₁ and leaves eigenvectors unchanged.
/// Rows whose order is inverted by the factors are re-sorted (eigenvector
/// columns follow) and `reordered` is set.
PosteriorSamples posthoc_adjust(const PosteriorSamples& samples, const CorrectionContext& ctx,
                                double nu);

/// Re-sorts any draw whose eigenvalues are not descending, permuting the
/// matching eigenvector columns. Returns true if a draw was touched.
bool enforce_descending(PosteriorSamples& samples);

/// Scales each draw column by `factors` with the same reordering rule.
PosteriorSamples scale_draws(const PosteriorSamples& samples, const Vector& factors);

}  // namespace spikecov
