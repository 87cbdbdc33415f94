#pragma once

#include "spikecov/eigen_inference.hpp"
#include "spikecov/pipeline.hpp"
#include "spikecov/spike_count.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace spikecov {

struct AnalysisConfig {
  Method method = Method::iw_phc;
  std::optional<int> k;  // unset: use the MAP of the spike posterior (at least 1)
  int draws = 500;
  double level = 0.95;
  std::uint64_t seed = 0;
  PriorSettings prior;
  SpikePrior spike_prior;  // k_max <= 0 selects default_k_max
  SamplingMode mode = SamplingMode::full;
  bool eigenvectors = false;
  unsigned threads = 1;
};

struct AnalysisReport {
  AnalysisConfig config;
  int n = 0;
  int p = 0;
  int dropped = 0;
  std::vector<std::string> tickers;
  std::vector<double> sample_eigenvalues;  // leading min(n, p) at most
  std::optional<SpikePosterior> spike;
  std::string spike_error;
  int k_used = 0;
  double c_hat = 0.0;
  std::vector<double> nus;
  std::vector<double> factors;
  std::vector<EigenSummary> eigenvalues;
  std::vector<VectorSummary> eigenvectors;
  bool reordered = false;
  bool extrapolated = false;
};

/// Spike posterior, then the chosen pipeline at the MAP (or fixed) K.
AnalysisReport analyze(const ObservationMatrix& x, const AnalysisConfig& config);

}  // namespace spikecov
