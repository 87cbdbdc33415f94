#pragma once

#include "spikecov/matrix_core.hpp"
#include "spikecov/sampling.hpp"

#include <cstdint>
#include <vector>

namespace spikecov {

/// Conjugate inverse-Wishart posterior IW(A + nS, ν + n) together with its
/// center Σ̂ = (nS + A)/(n + ν − 2p − 2).
struct PosteriorSpec {
  SymMatrix scale;        // A + nS
  Matrix scale_cholesky;  // lower factor of `scale`
  double nu_prior = 0.0;  // ν (prior, density convention)
  double nu_post = 0.0;   // ν + n
  int n = 0;
  int p = 0;
  SymMatrix sigma_hat;
  EigenDecomposition sigma_hat_eigen;

  /// n + ν − 2p − 2, the denominator of Σ̂.
  double center_denominator() const { return n + nu_prior - 2.0 * p - 2.0; }
};

PosteriorSpec build_posterior(const SymMatrix& s, int n, const SymMatrix& a, double nu);

/// One draw of Σ from the posterior.
SymMatrix draw_sigma(const PosteriorSpec& spec, RngStream& stream);

enum class SamplingMode { full, fast_topk };

/// N draws of the K leading eigenpairs.
struct PosteriorSamples {
  int k = 0;
  int n_draws = 0;
  Matrix eigenvalues;                // N×K, row j = draw j, descending
  std::vector<Matrix> eigenvectors;  // per draw p×K; one shared entry when fixed_eigenvectors
  Vector traces;                     // tr(Σ_j) per draw; empty in fast mode
  SamplingMode mode = SamplingMode::full;
  bool adjusted = false;
  bool reordered = false;            // adjustment changed the within-draw order
  bool fixed_eigenvectors = false;   // fast mode: Σ̂'s eigenvectors, not draws
  bool extrapolated = false;         // fast mode used with p ≤ n

  bool has_eigenvectors() const { return !eigenvectors.empty(); }
  /// p×K eigenvectors for draw j.
  const Matrix& vectors_for(int j) const {
    return fixed_eigenvectors ? eigenvectors.front() : eigenvectors.at(static_cast<std::size_t>(j));
  }
};

struct DrawOptions {
  unsigned threads = 1;
  bool eigenvectors = true;
};

/// Draw j uses RngStream(seed, j); results are assembled in draw order and
/// do not depend on `options.threads`.
PosteriorSamples posterior_eigen_draws(const PosteriorSpec& spec, int k, int n_draws,
                                       std::uint64_t seed, SamplingMode mode,
                                       const DrawOptions& options = {});

/// Closed-form posterior expectation of ‖[Ω₂₁]_k‖² for k = 1..K, where
/// Ω = Γ̂ᵀ Σ Γ̂ in the eigenbasis Γ̂ of Σ̂:
///   D λ̂_k Σ_{l>K} λ̂_l / ((D + 1)(D − 2)),  D = n + ν − 2p − 2.
Vector expected_offblock_norms(const PosteriorSpec& spec, int k);

/// Eigenvalues of Σ̂ with entries below 1e−12·λ̂₁ raised to that floor.
Vector floored_center_eigenvalues(const PosteriorSpec& spec);

/// Approximate draw of the K leading posterior eigenvalues from the K×K
/// block Ω₁₁ ~ IW_K(D·diag(λ̂₁..λ̂_K), n + ν − 2p + 2K), corrected by
/// (1 + E‖[Ω₂₁]_k‖²/λ_k(Ω₁₁)²).
Vector topk_fast_draw(const PosteriorSpec& spec, int k, RngStream& stream);

}  // namespace spikecov
