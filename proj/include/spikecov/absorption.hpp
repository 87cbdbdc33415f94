#pragma once

#include "spikecov/matrix_core.hpp"
#include "spikecov/pipeline.hpp"
#include "spikecov/posterior.hpp"
#include "spikecov/series.hpp"
#include "spikecov/spike_count.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace spikecov {

/// Share of total variance in the leading K eigenvalues.
double absorption_ratio(const Vector& eigenvalues, int k);

/// Per-draw AR: Σ top-K draw / (Σ top-K draw + bulk_sum). The bulk is held
/// at its sample value Σ_{k>K} λ̂_k(S).
Vector absorption_ratio_draws(const PosteriorSamples& samples, double bulk_sum);

/// Per-draw AR from raw draws using the full trace of each Σ_j.
Vector absorption_ratio_trace_draws(const PosteriorSamples& samples);

struct RollingConfig {
  int window = 12;
  int step = 1;
  int draws = 500;
  double level = 0.95;
  std::uint64_t seed = 0;
  PriorSettings prior;
  SpikePrior spike_prior;  // k_max <= 0 selects default_k_max per window
  bool center = false;
  /// Multiply the prior scale by tr(S)/p of each window, so results do not
  /// depend on the units of the returns.
  bool relative_prior = true;
  unsigned threads = 1;
};

struct WindowResult {
  int index = 0;
  std::string start_date;
  std::string end_date;
  int n_used = 0;
  int dropped = 0;
  std::vector<int> support;
  std::vector<double> spike_probs;
  int map_k = 0;
  double entropy = 0.0;  // NaN when no spike posterior could be formed
  int ar_k = 0;          // K used for AR (MAP, at least 1)
  double prior_a = 0.0;  // prior scale actually used in this window
  double ar_mean = 0.0;  // bias-corrected posterior
  double ar_low = 0.0;
  double ar_high = 0.0;
  double ar_iw_mean = 0.0;  // uncorrected posterior
  double ar_iw_low = 0.0;
  double ar_iw_high = 0.0;
  bool degraded = false;
  std::string note;
};

struct RollingReport {
  RollingConfig config;
  std::vector<std::string> tickers;
  std::vector<WindowResult> windows;
};

/// Number of windows over `rows` observations.
int window_count(int rows, int window, int step);

/// Evaluates one window of a return table (rows [start, start + window)).
WindowResult analyze_window(const PriceSeries& returns, int index, int start,
                            const RollingConfig& config);

RollingReport rolling_analysis_returns(const PriceSeries& returns, const RollingConfig& config);

/// Converts prices to log returns, then runs the rolling analysis.
RollingReport rolling_analysis(const PriceSeries& prices, const RollingConfig& config);

}  // namespace spikecov
