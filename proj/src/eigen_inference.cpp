#include "spikecov/eigen_inference.hpp"

#include "spikecov/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace spikecov {

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw InvalidConfiguration("quantile: empty input");
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidConfiguration("quantile: q outside [0,1]");
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::pair<double, double> credible_interval(std::span<const double> draws, double level) {
  if (!(level > 0.0 && level < 1.0)) throw InvalidConfiguration("credible level must be in (0,1)");
  std::vector<double> sorted(draws.begin(), draws.end());
  std::sort(sorted.begin(), sorted.end());
  const double tail = 0.5 * (1.0 - level);
  return {quantile_sorted(sorted, tail), quantile_sorted(sorted, 1.0 - tail)};
}

double mean_of(std::span<const double> values) {
  if (values.empty()) throw InvalidConfiguration("mean of empty range");
  return pairwise_sum(values.data(), values.size()) / static_cast<double>(values.size());
}

std::vector<EigenSummary> summarize_eigenvalues(const PosteriorSamples& samples, double level) {
  if (samples.n_draws < 2) throw InvalidConfiguration("summarize_eigenvalues: need N >= 2");
  std::vector<EigenSummary> out;
  out.reserve(static_cast<std::size_t>(samples.k));
  std::vector<double> column(static_cast<std::size_t>(samples.n_draws));
  for (int c = 0; c < samples.k; ++c) {
    for (int j = 0; j < samples.n_draws; ++j) column[static_cast<std::size_t>(j)] = samples.eigenvalues(j, c);
    EigenSummary s;
    s.k = c + 1;
    s.n_draws = samples.n_draws;
    s.mean = mean_of(column);
    std::tie(s.ci_low, s.ci_high) = credible_interval(column, level);
    s.mean_outside_ci = s.mean < s.ci_low || s.mean > s.ci_high;
    out.push_back(s);
  }
  return out;
}

VectorSummary mean_eigenvector(const PosteriorSamples& samples, int k) {
  if (!samples.has_eigenvectors() || samples.fixed_eigenvectors) {
    throw InvalidConfiguration("mean_eigenvector: requires full-mode eigenvector draws");
  }
  if (k < 1 || k > samples.k) throw InvalidConfiguration("mean_eigenvector: k out of range");
  const Vector reference = samples.vectors_for(0).col(k - 1);
  const Index p = reference.size();
  const auto n = static_cast<std::size_t>(samples.n_draws);

  // Column-per-draw layout so each coordinate sums pairwise over draws.
  Matrix aligned(p, samples.n_draws);
  for (int j = 0; j < samples.n_draws; ++j) {
    Vector v = samples.vectors_for(j).col(k - 1);
    if (v.dot(reference) < 0.0) v = -v;
    aligned.col(j) = v;
  }
  Vector sum(p);
  for (Index i = 0; i < p; ++i) {
    sum(i) = pairwise_sum(aligned.data() + i, n, static_cast<std::size_t>(p));
  }
  const double norm = sum.norm();
  if (!(norm > 1e-12 * static_cast<double>(n))) {
    throw NumericalFailure("mean_eigenvector: degenerate direction (draws cancel)");
  }
  VectorSummary out;
  out.k = k;
  out.mean_vector = sum / norm;
  std::vector<double> spread(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double c = aligned.col(static_cast<Index>(j)).dot(out.mean_vector);
    spread[j] = 1.0 - c * c;
  }
  out.dispersion = mean_of(spread);
  return out;
}

double eigenvector_error(const Vector& est, const Vector& truth) {
  if (est.size() != truth.size()) throw InvalidConfiguration("eigenvector_error: size mismatch");
  constexpr double tol = 1e-8;
  if (std::abs(est.norm() - 1.0) > tol || std::abs(truth.norm() - 1.0) > tol) {
    throw InvalidConfiguration("eigenvector_error: inputs must be unit vectors");
  }
  const double c = est.dot(truth);
  return std::clamp(1.0 - c * c, 0.0, 1.0);
}

double relative_error(double est, double truth) {
  if (!(truth > 0.0)) throw InvalidConfiguration("relative_error: truth must be positive");
  return std::abs(est - truth) / truth;
}

double coverage(std::span<const std::pair<double, double>> intervals, double truth) {
  if (intervals.empty()) throw InvalidConfiguration("coverage: no intervals");
  std::size_t hit = 0;
  for (const auto& [lo, hi] : intervals) {
    if (lo <= truth && truth <= hi) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(intervals.size());
}

}  // namespace spikecov
