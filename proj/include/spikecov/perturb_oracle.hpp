#pragma once

#include "spikecov/matrix_core.hpp"

namespace spikecov {

/// Γᵀ Σ Γ partitioned after the first K coordinates.
struct BlockDecomposition {
  Matrix gamma;
  Matrix omega11;  // K×K
  Matrix omega21;  // (p−K)×K
  Matrix omega22;  // (p−K)×(p−K)

  int k() const { return static_cast<int>(omega11.rows()); }
  /// Reassembled Γᵀ Σ Γ.
  Matrix assemble() const;
};

BlockDecomposition block_decompose(const SymMatrix& sigma, const Matrix& gamma, int k);

/// First-order expansion of λ_k(Σ) around the leading block:
///   λ_k(Σ) ≈ λ_k(Ω₁₁)(1 + ‖Ω₂₁ξ_k‖²/λ_k(Ω₁₁)²),
/// with ξ_k the k-th eigenvector of Ω₁₁ (k is 1-based).
struct ExpansionResult {
  double approx = 0.0;
  double leading_correction = 0.0;
  double block_eigenvalue = 0.0;  // λ_k(Ω₁₁)
  bool hypothesis_ok = true;      // λ_k(Ω₁₁) > 1
};

ExpansionResult expansion_approx(const BlockDecomposition& bd, int k);

/// (4eCx/λ)³ / (1 − 4eCx/λ); +inf when 4eCx/λ ≥ 1.
double expansion_residual_bound(double x, double lambda, double c);

/// Smallest admissible x for the residual bound at index k: the max of
/// ‖Ω₂₂‖₂ and the weighted ‖Ω₂₁ξ_l‖ terms, with weight exponents d1, d2.
double expansion_bound_x(const BlockDecomposition& bd, int k, double c, double d1, double d2);

}  // namespace spikecov
