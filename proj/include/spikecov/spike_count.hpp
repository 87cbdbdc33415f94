#pragma once

#include "spikecov/matrix_core.hpp"

#include <vector>

namespace spikecov {

struct SpikePrior {
  enum class Kind { uniform, exponential };
  Kind kind = Kind::uniform;
  double alpha = 1.0;  // exponential: π(K) ∝ exp(−αK)
  int k_min = 1;
  int k_max = 0;  // <= 0 selects default_k_max

  double log_weight(int k) const;
};

struct SpikePosterior {
  std::vector<int> support;
  std::vector<double> probs;
  std::vector<double> bic;  // BIC_K on the support (constant dropped)
  int map_k = 0;
  double entropy = 0.0;     // nats
  bool truncated = false;   // support shortened by degenerate eigenvalues
};

/// Free-parameter count pK − K(K+1)/2 + K + 1.
double bic_param_count(int p, int k);

/// BIC_K = n Σ_{k≤K} log λ̂_k + n(p−K) log ĉ_K + d_K log n, with
/// ĉ_K the mean of the trailing p − K eigenvalues. Constants are dropped;
/// only differences across K matter.
double bic(const Vector& s_eigs, int n, int p, int k);

/// Default upper end of the support: max(10, ⌊min(n,p)/10⌋), capped below
/// rank(S) and at min(n,p) − 1.
int default_k_max(int n, int p, int rank);

/// Numerical rank of S from its descending eigenvalues.
int numerical_rank(const Vector& s_eigs);

/// π(K | X) ∝ exp(−BIC_K/2) π(K) via log-sum-exp.
SpikePosterior spike_posterior(const Vector& s_eigs, int n, int p, const SpikePrior& prior);

/// Normalizes exp(−bic/2)·π over a given support; exposed so the
/// normalization can be checked apart from the BIC itself.
SpikePosterior posterior_from_bic(const std::vector<int>& support, const std::vector<double>& bics,
                                  const SpikePrior& prior);

/// −Σ p log p with 0·log 0 = 0.
double entropy(const SpikePosterior& post);
double entropy(const std::vector<double>& probs);

}  // namespace spikecov
