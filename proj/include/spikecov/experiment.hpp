#pragma once

#include "spikecov/pipeline.hpp"
#include "spikecov/simgen.hpp"
#include "spikecov/spike_count.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace spikecov {

/// Estimators compared in a replication study. `sample` uses the
/// eigenvalues of S directly and has no credible interval.
enum class Estimator { sample, iw, iw_pc, iw_phc };

std::string_view to_string(Estimator e);
Estimator parse_estimator(std::string_view name);

struct ExperimentConfig {
  int setting = 1;
  Setting1Config setting1;
  Setting2Config setting2;
  int replications = 2;
  int draws = 500;
  double level = 0.95;
  std::uint64_t seed = 1;
  std::vector<Estimator> estimators{Estimator::sample, Estimator::iw, Estimator::iw_pc,
                                    Estimator::iw_phc};
  PriorSettings prior;
  bool spike_count = true;
  SpikePrior spike_prior;  // k_max <= 0 selects default_k_max
  bool eigenvectors = false;
  SamplingMode mode = SamplingMode::full;

  int n() const { return setting == 1 ? setting1.n : setting2.n; }
  int p() const { return setting == 1 ? setting1.p : setting2.p; }
  int true_k() const {
    return static_cast<int>(setting == 1 ? setting1.spikes.size() : setting2.spike_norms.size());
  }
  void validate() const;
};

/// Flat `key = value` text; `#` starts a comment. Unknown keys are errors.
ExperimentConfig parse_experiment_config(std::istream& in);
ExperimentConfig load_experiment_config(const std::string& path);

struct MethodOutcome {
  Estimator estimator = Estimator::sample;
  std::vector<double> estimate;   // point estimate per spike index
  std::vector<double> rel_error;
  std::vector<double> ci_low;     // empty for `sample`
  std::vector<double> ci_high;
  std::vector<int> covered;
  std::vector<double> vector_error;  // empty unless eigenvectors requested
};

struct ReplicationRecord {
  int index = 0;
  bool ok = true;
  std::string error;
  std::vector<double> truth;         // leading K true eigenvalues
  std::vector<double> sample_eigs;   // leading K eigenvalues of S
  double c_hat = 0.0;
  std::vector<MethodOutcome> methods;
  std::vector<double> pc_nus;
  /// |γ̃₁(ν_k) − γ₂| / γ₂ at the calibrated ν_k.
  std::vector<double> pc_fixed_point_residual;
  std::vector<double> phc_factors;
  int map_k = -1;
  double spike_entropy = 0.0;
};

struct MethodSummary {
  Estimator estimator = Estimator::sample;
  std::vector<double> err_mean;
  std::vector<double> cp;          // NaN for `sample`
  std::vector<double> err_xi_mean; // empty unless eigenvectors requested
};

struct ExperimentReport {
  ExperimentConfig config;
  int completed = 0;
  std::vector<int> failed;
  std::vector<MethodSummary> methods;
  double spike_avg = 0.0;
  double spike_acc = 0.0;
  std::vector<ReplicationRecord> records;
  std::vector<std::string> notes;

  const MethodSummary* find(Estimator e) const;
};

/// Replication r uses RngStream(seed, r) for its data and seeds derived
/// from it for posterior draws, so reports are independent of `threads`.
ExperimentReport run_experiment(const ExperimentConfig& config, unsigned threads = 1);

ReplicationRecord run_replication(const ExperimentConfig& config, int index);

}  // namespace spikecov
