#pragma once

#include "spikecov/bias_correction.hpp"
#include "spikecov/posterior.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace spikecov {

/// iw: raw conjugate posterior; iw_pc: per-index calibrated prior
/// degrees of freedom; iw_phc: post-hoc multiplicative correction.
enum class Method { iw, iw_pc, iw_phc };

std::string_view to_string(Method m);
Method parse_method(std::string_view name);

struct PriorSettings {
  double a_scale = 0.1;       // A = a_scale · I
  std::optional<double> nu;   // default 2p + 2

  double nu_for(int p) const { return nu.value_or(2.0 * p + 2.0); }
};

struct PipelineConfig {
  Method method = Method::iw_phc;
  int k = 1;
  int draws = 500;
  std::uint64_t seed = 0;
  PriorSettings prior;
  SamplingMode mode = SamplingMode::full;
  DrawOptions draw;
};

struct PipelineResult {
  PosteriorSamples samples;
  /// iw_phc only: the unadjusted draws the correction was applied to.
  std::optional<PosteriorSamples> raw;
  CorrectionContext context;
  Vector nus;      // prior ν used for each spike index
  Vector factors;  // iw_phc: γ₂/γ̃₁ per index; ones otherwise
};

PipelineResult run_pipeline(const SymMatrix& s, int n, const PipelineConfig& config);

}  // namespace spikecov
