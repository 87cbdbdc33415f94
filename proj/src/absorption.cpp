#include "spikecov/absorption.hpp"

#include "spikecov/bias_correction.hpp"
#include "spikecov/eigen_inference.hpp"
#include "spikecov/errors.hpp"
#include "spikecov/parallel.hpp"
#include "spikecov/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <sstream>
#include <tuple>

namespace spikecov {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void summarize_into(const Vector& draws, double level, double& mean, double& lo, double& hi) {
  std::span<const double> view(draws.data(), static_cast<std::size_t>(draws.size()));
  mean = mean_of(view);
  std::tie(lo, hi) = credible_interval(view, level);
}

}  // namespace

double absorption_ratio(const Vector& eigenvalues, int k) {
  const auto p = static_cast<int>(eigenvalues.size());
  if (k < 1 || k > p) throw InvalidConfiguration("absorption_ratio: K must be in 1..p");
  if ((eigenvalues.array() < 0.0).any()) {
    throw InvalidConfiguration("absorption_ratio: eigenvalues must be nonnegative");
  }
  const double total = pairwise_sum(eigenvalues.data(), static_cast<std::size_t>(p));
  if (!(total > 0.0)) throw NumericalFailure("absorption_ratio: zero total variance");
  return pairwise_sum(eigenvalues.data(), static_cast<std::size_t>(k)) / total;
}

Vector absorption_ratio_draws(const PosteriorSamples& samples, double bulk_sum) {
  Vector out(samples.n_draws);
  for (int j = 0; j < samples.n_draws; ++j) {
    const double top = samples.eigenvalues.row(j).sum();
    const double total = top + bulk_sum;
    if (!(total > 0.0)) throw NumericalFailure("absorption_ratio_draws: zero total variance");
    out(j) = top / total;
  }
  return out;
}

Vector absorption_ratio_trace_draws(const PosteriorSamples& samples) {
  if (samples.traces.size() != samples.n_draws) {
    throw InvalidConfiguration("absorption_ratio_trace_draws: needs full-mode draws with traces");
  }
  Vector out(samples.n_draws);
  for (int j = 0; j < samples.n_draws; ++j) out(j) = samples.eigenvalues.row(j).sum() / samples.traces(j);
  return out;
}

int window_count(int rows, int window, int step) {
  if (window < 1 || step < 1) throw InvalidConfiguration("window and step must be positive");
  if (rows < window) return 0;
  return (rows - window) / step + 1;
}

WindowResult analyze_window(const PriceSeries& returns, int index, int start,
                            const RollingConfig& config) {
  WindowResult w;
  w.index = index;
  w.start_date = returns.dates.at(static_cast<std::size_t>(start));
  w.end_date = returns.dates.at(static_cast<std::size_t>(start + config.window - 1));
  w.entropy = kNaN;

  CompleteRows rows = complete_rows(returns.values.middleRows(start, config.window), config.center);
  w.dropped = rows.dropped;
  w.n_used = static_cast<int>(rows.x.rows());
  const int n = w.n_used;
  const int p = static_cast<int>(returns.values.cols());
  if (n < 2) {
    w.degraded = true;
    w.note = "fewer than 2 complete rows";
    w.ar_mean = w.ar_low = w.ar_high = w.ar_iw_mean = w.ar_iw_low = w.ar_iw_high = kNaN;
    return w;
  }

  const SymMatrix s = sample_covariance(ObservationMatrix(std::move(rows.x)));
  const Vector s_eigs = sym_eigenvalues(s);
  const int rank = numerical_rank(s_eigs);

  int k = 1;
  std::vector<std::string> notes;
  SpikePrior prior = config.spike_prior;
  const int k_cap = default_k_max(n, p, rank);
  prior.k_max = prior.k_max > 0 ? std::min(prior.k_max, k_cap) : k_cap;
  if (prior.k_max >= std::max(prior.k_min, 0) && rank >= 1) {
    try {
      const SpikePosterior post = spike_posterior(s_eigs, n, p, prior);
      w.support = post.support;
      w.spike_probs = post.probs;
      w.map_k = post.map_k;
      w.entropy = post.entropy;
      k = std::max(1, post.map_k);
    } catch (const std::exception& e) {
      w.degraded = true;
      notes.emplace_back(std::string("spike posterior unavailable: ") + e.what());
    }
  } else {
    w.degraded = true;
    notes.emplace_back("spike posterior unavailable: rank(S) too small");
  }
  k = std::min(k, std::min(n, p));
  w.ar_k = k;

  double a_scale = config.prior.a_scale;
  if (config.relative_prior) {
    const double avg = pairwise_sum(s_eigs.data(), static_cast<std::size_t>(p)) / p;
    if (avg > 0.0) a_scale *= avg;
  }
  w.prior_a = a_scale;
  const SymMatrix a = SymMatrix::scaled_identity(p, a_scale);
  const double nu = config.prior.nu_for(p);
  const PosteriorSpec spec = build_posterior(s, n, a, nu);
  DrawOptions opts;
  opts.eigenvectors = false;
  const std::uint64_t seed = RngStream(config.seed, static_cast<std::uint64_t>(index)).derive_seed(0);
  const PosteriorSamples raw = posterior_eigen_draws(spec, k, config.draws, seed, SamplingMode::full, opts);

  const Vector iw_ar = absorption_ratio_trace_draws(raw);
  summarize_into(iw_ar, config.level, w.ar_iw_mean, w.ar_iw_low, w.ar_iw_high);

  bool corrected = false;
  if (!w.degraded) {
    try {
      const Vector splus = (s_eigs.array() + a_scale / n).matrix();
      const CorrectionContext ctx = make_correction_context(s_eigs, splus, n, k);
      const PosteriorSamples adjusted = posthoc_adjust(raw, ctx, nu);
      const double bulk = pairwise_sum(s_eigs.data() + k, static_cast<std::size_t>(p - k));
      const Vector ar = absorption_ratio_draws(adjusted, std::max(0.0, bulk));
      summarize_into(ar, config.level, w.ar_mean, w.ar_low, w.ar_high);
      corrected = true;
    } catch (const std::exception& e) {
      notes.emplace_back(std::string("correction infeasible: ") + e.what());
    }
  }
  if (!corrected) {
    w.degraded = true;
    notes.emplace_back("raw IW fallback");
    w.ar_mean = w.ar_iw_mean;
    w.ar_low = w.ar_iw_low;
    w.ar_high = w.ar_iw_high;
  }
  std::ostringstream joined;
  for (std::size_t i = 0; i < notes.size(); ++i) joined << (i ? "; " : "") << notes[i];
  w.note = joined.str();
  return w;
}

RollingReport rolling_analysis_returns(const PriceSeries& returns, const RollingConfig& config) {
  if (config.window < 3) throw InvalidConfiguration("window must be >= 3");
  if (config.step < 1) throw InvalidConfiguration("step must be >= 1");
  if (config.draws < 2) throw InvalidConfiguration("draws must be >= 2");
  RollingReport report;
  report.config = config;
  report.tickers = returns.tickers;
  const int count = window_count(static_cast<int>(returns.rows()), config.window, config.step);
  report.windows.resize(static_cast<std::size_t>(count));
  parallel_for(static_cast<std::size_t>(count), config.threads, [&](std::size_t i) {
    const int idx = static_cast<int>(i);
    report.windows[i] = analyze_window(returns, idx, idx * config.step, config);
  });
  return report;
}

RollingReport rolling_analysis(const PriceSeries& prices, const RollingConfig& config) {
  return rolling_analysis_returns(log_returns(prices), config);
}

}  // namespace spikecov
