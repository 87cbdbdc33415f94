#include "spikecov/spike_count.hpp"

#include "spikecov/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace spikecov {

namespace {

constexpr double kRankTolerance = 1e-10;

bool bic_defined(const Vector& s_eigs, int p, int k) {
  for (int i = 0; i < k; ++i) {
    if (!(s_eigs(i) > 0.0)) return false;
  }
  if (k == p) return true;
  return pairwise_sum(s_eigs.data() + k, static_cast<std::size_t>(p - k)) > 0.0;
}

}  // namespace

double SpikePrior::log_weight(int k) const {
  return kind == Kind::uniform ? 0.0 : -alpha * k;
}

double bic_param_count(int p, int k) {
  return static_cast<double>(p) * k - 0.5 * k * (k + 1.0) + k + 1.0;
}

double bic(const Vector& s_eigs, int n, int p, int k) {
  if (s_eigs.size() != p) throw InvalidConfiguration("bic: expected p eigenvalues");
  if (k < 0 || k >= std::min(n, p)) {
    std::ostringstream msg;
    msg << "bic: K=" << k << " must satisfy 0 <= K < min(n,p)=" << std::min(n, p);
    throw InvalidConfiguration(msg.str());
  }
  double fit = 0.0;
  for (int i = 0; i < k; ++i) {
    if (!(s_eigs(i) > 0.0)) {
      throw NumericalFailure("bic: rank-deficient spectrum (zero eigenvalue inside K); "
                             "cap k_max at rank(S) - 1");
    }
    fit += std::log(s_eigs(i));
  }
  const double c_k = pairwise_sum(s_eigs.data() + k, static_cast<std::size_t>(p - k)) / (p - k);
  if (!(c_k > 0.0)) {
    throw NumericalFailure("bic: bulk mean c_K is not positive; cap k_max at rank(S) - 1");
  }
  return n * fit + static_cast<double>(n) * (p - k) * std::log(c_k) +
         bic_param_count(p, k) * std::log(static_cast<double>(n));
}

int numerical_rank(const Vector& s_eigs) {
  if (s_eigs.size() == 0 || !(s_eigs(0) > 0.0)) return 0;
  const double tol = kRankTolerance * s_eigs(0);
  int r = 0;
  for (Index i = 0; i < s_eigs.size(); ++i) {
    if (s_eigs(i) > tol) ++r;
  }
  return r;
}

int default_k_max(int n, int p, int rank) {
  const int m = std::min(n, p);
  int k = std::max(10, m / 10);
  k = std::min(k, m - 1);
  k = std::min(k, rank - 1);
  return k;
}

SpikePosterior posterior_from_bic(const std::vector<int>& support, const std::vector<double>& bics,
                                  const SpikePrior& prior) {
  if (support.empty() || support.size() != bics.size()) {
    throw InvalidConfiguration("posterior_from_bic: empty or mismatched support");
  }
  // Centre the BIC values before adding prior weights so large magnitudes do not eat the prior's bits
  const double low = *std::min_element(bics.begin(), bics.end());
  std::vector<double> logw(support.size());
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < support.size(); ++i) {
    logw[i] = -0.5 * (bics[i] - low) + prior.log_weight(support[i]);
    top = std::max(top, logw[i]);
  }
  SpikePosterior post;
  post.support = support;
  post.bic = bics;
  post.probs.resize(support.size());
  double total = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    post.probs[i] = std::exp(logw[i] - top);
    total += post.probs[i];
  }
  std::size_t best = 0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    post.probs[i] /= total;
    if (post.probs[i] > post.probs[best]) best = i;
  }
  post.map_k = support[best];
  post.entropy = entropy(post.probs);
  return post;
}

SpikePosterior spike_posterior(const Vector& s_eigs, int n, int p, const SpikePrior& requested) {
  SpikePrior prior = requested;
  if (prior.k_max <= 0) {
    prior.k_max = default_k_max(n, p, numerical_rank(s_eigs));
    if (prior.k_max < prior.k_min) throw NumericalFailure("spike_posterior: rank(S) too small for a spike posterior");
  }
  if (prior.k_min < 0 || prior.k_max < prior.k_min) {
    throw InvalidConfiguration("spike_posterior: invalid prior support");
  }
  if (prior.k_max > std::min(n, p) - 1) {
    throw InvalidConfiguration("spike_posterior: k_max must be <= min(n,p) - 1");
  }
  if (prior.kind == SpikePrior::Kind::exponential && !(prior.alpha > 0.0)) {
    throw InvalidConfiguration("spike_posterior: exponential prior needs alpha > 0");
  }
  std::vector<int> support;
  std::vector<double> bics;
  bool truncated = false;
  for (int k = prior.k_min; k <= prior.k_max; ++k) {
    if (!bic_defined(s_eigs, p, k)) {
      truncated = true;
      break;
    }
    support.push_back(k);
    bics.push_back(bic(s_eigs, n, p, k));
  }
  if (support.empty()) {
    throw NumericalFailure("spike_posterior: no computable BIC on the support (degenerate S)");
  }
  SpikePosterior post = posterior_from_bic(support, bics, prior);
  post.truncated = truncated;
  return post;
}

double entropy(const std::vector<double>& probs) {
  double h = 0.0;
  for (double q : probs) {
    if (q > 0.0) h -= q * std::log(q);
  }
  return std::max(0.0, h);
}

double entropy(const SpikePosterior& post) { return entropy(post.probs); }

}  // namespace spikecov
