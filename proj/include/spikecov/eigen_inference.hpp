#pragma once

#include "spikecov/matrix_core.hpp"
#include "spikecov/posterior.hpp"

#include <span>
#include <utility>
#include <vector>

namespace spikecov {

struct EigenSummary {
  int k = 0;  // 1-based spike index
  double mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  int n_draws = 0;
  bool mean_outside_ci = false;
};

struct VectorSummary {
  int k = 0;
  Vector mean_vector;
  double dispersion = 0.0;  // mean of 1 − (ξ_jᵀ ξ̄)²
};

/// Empirical quantile with linear interpolation at 0-based rank q(N−1).
/// `sorted` must be ascending.
double quantile_sorted(std::span<const double> sorted, double q);

/// Equal-tailed credible interval [(1−level)/2, 1−(1−level)/2].
std::pair<double, double> credible_interval(std::span<const double> draws, double level);

double mean_of(std::span<const double> values);

std::vector<EigenSummary> summarize_eigenvalues(const PosteriorSamples& samples, double level);

/// Sign-aligned chordal mean of the k-th eigenvector draws: each draw is
/// flipped to agree with the first, then averaged and normalized.
VectorSummary mean_eigenvector(const PosteriorSamples& samples, int k);

/// 1 − (estᵀ truth)² for unit vectors.
double eigenvector_error(const Vector& est, const Vector& truth);

/// |est − truth| / truth.
double relative_error(double est, double truth);

/// Fraction of closed intervals containing `truth`.
double coverage(std::span<const std::pair<double, double>> intervals, double truth);

}  // namespace spikecov
