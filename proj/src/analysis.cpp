#include "spikecov/analysis.hpp"

#include "spikecov/errors.hpp"

#include <algorithm>

namespace spikecov {

AnalysisReport analyze(const ObservationMatrix& x, const AnalysisConfig& config) {
  if (config.draws < 2) throw InvalidConfiguration("draws must be >= 2");
  if (!(config.level > 0.0 && config.level < 1.0)) throw InvalidConfiguration("level must be in (0,1)");

  AnalysisReport report;
  report.config = config;
  report.n = static_cast<int>(x.n());
  report.p = static_cast<int>(x.p());
  const int n = report.n;
  const int p = report.p;

  const SymMatrix s = sample_covariance(x);
  const Vector s_eigs = sym_eigenvalues(s);
  const int keep = std::min(n, p);
  report.sample_eigenvalues.assign(s_eigs.data(), s_eigs.data() + keep);
  const int rank = numerical_rank(s_eigs);

  SpikePrior prior = config.spike_prior;
  const int k_cap = default_k_max(n, p, rank);
  prior.k_max = prior.k_max > 0 ? std::min(prior.k_max, k_cap) : k_cap;
  report.config.spike_prior = prior;
  try {
    if (prior.k_max < prior.k_min) throw NumericalFailure("rank(S) too small for a spike posterior");
    report.spike = spike_posterior(s_eigs, n, p, prior);
  } catch (const NumericalFailure& e) {
    report.spike_error = e.what();
  }

  int k = 0;
  if (config.k) {
    k = *config.k;
    if (k < 1 || k >= keep) throw InvalidConfiguration("k must be in 1..min(n,p)-1");
  } else {
    if (!report.spike) throw NumericalFailure("spike posterior unavailable: " + report.spike_error);
    k = std::max(1, report.spike->map_k);
  }
  report.k_used = k;

  PipelineConfig pc;
  pc.method = config.method;
  pc.k = k;
  pc.draws = config.draws;
  pc.seed = config.seed;
  pc.prior = config.prior;
  pc.mode = config.mode;
  pc.draw.threads = config.threads;
  pc.draw.eigenvectors = config.eigenvectors && config.mode == SamplingMode::full;
  const PipelineResult result = run_pipeline(s, n, pc);

  report.c_hat = result.context.c_hat;
  report.nus.assign(result.nus.data(), result.nus.data() + result.nus.size());
  report.factors.assign(result.factors.data(), result.factors.data() + result.factors.size());
  report.eigenvalues = summarize_eigenvalues(result.samples, config.level);
  report.reordered = result.samples.reordered;
  report.extrapolated = result.samples.extrapolated;
  if (pc.draw.eigenvectors) {
    for (int i = 1; i <= k; ++i) report.eigenvectors.push_back(mean_eigenvector(result.samples, i));
  }
  return report;
}

}  // namespace spikecov
