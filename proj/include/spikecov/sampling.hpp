#pragma once

#include "spikecov/matrix_core.hpp"

#include <cstdint>
#include <random>

namespace spikecov {

/// Random stream keyed by (master_seed, draw_index). The pair fully
/// determines every value produced, so draws can be evaluated in any
/// order or on any number of workers.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t draw_index);

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t draw_index() const { return draw_index_; }

  /// Seed for an independent family of streams derived from this one,
  /// e.g. the posterior draws of one replication.
  std::uint64_t derive_seed(std::uint64_t salt) const;

  double normal();
  double uniform();
  /// Gamma with shape/rate parameterization (mean shape/rate).
  double gamma(double shape, double rate);
  /// Chi-square for real df, generated as Gamma(df/2, rate 1/2).
  double chi_square(double df);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t master_seed_;
  std::uint64_t draw_index_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// SplitMix64 finalizer; used to decorrelate seeds.
std::uint64_t mix_seed(std::uint64_t x);

/// Wishart(df, scale) via the Bartlett decomposition. Requires df > p − 1.
SymMatrix wishart_draw(double df, const SymMatrix& scale, RngStream& stream);

/// Inverse-Wishart in the density convention
///   π(Σ) ∝ |Σ|^{−ν/2} exp{−tr(Σ⁻¹A)/2},
/// which is the standard IW(A, m) with m = ν − p − 1. That mapping makes
/// E Σ = A / (ν − 2p − 2), matching the posterior center
/// (nS + A)/(n + ν − 2p − 2). Valid for ν > 2p; the mean exists only
/// for ν > 2p + 2.
struct InverseWishartDraw {
  SymMatrix sigma;
  bool mean_undefined = false;
};

/// Reusable sampler that factors the scale matrix once.
///
/// A draw is Σ = W⁻¹ with W ~ Wishart(m, A⁻¹). Writing A = L Lᵀ and taking
/// L⁻ᵀ as the factor of A⁻¹, W = L⁻ᵀ Z Zᵀ L⁻¹ for the Bartlett factor Z,
/// hence Σ = (L Z⁻ᵀ)(L Z⁻ᵀ)ᵀ. Only a triangular solve is needed; no
/// explicit inverse is formed.
class InverseWishartSampler {
 public:
  InverseWishartSampler(double nu, const SymMatrix& scale);
  InverseWishartSampler(double nu, const SymMatrix& scale, Matrix scale_cholesky);

  Index dim() const { return chol_.rows(); }
  double nu() const { return nu_; }
  /// Standard-form degrees of freedom m = ν − p − 1.
  double standard_df() const { return nu_ - static_cast<double>(dim()) - 1.0; }
  bool mean_undefined() const { return nu_ <= 2.0 * static_cast<double>(dim()) + 2.0; }

  SymMatrix draw(RngStream& stream) const;

 private:
  double nu_;
  Matrix chol_;
};

InverseWishartDraw inverse_wishart_draw(double nu, const SymMatrix& scale_a,
                                        RngStream& stream);

/// Lower-triangular Bartlett factor with diag² ~ χ²(df − i) and N(0,1)
/// below the diagonal.
Matrix bartlett_factor(Index p, double df, RngStream& stream);

}  // namespace spikecov
