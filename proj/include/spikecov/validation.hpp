#pragma once

#include "spikecov/matrix_core.hpp"
#include "spikecov/perturb_oracle.hpp"
#include "spikecov/sampling.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace spikecov {

struct ValidationCheck {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool passed = false;
  std::string detail;
};

struct ValidationConfig {
  std::uint64_t seed = 1;
  int draws = 50000;     // sampler-moment checks
  int instances = 20;    // perturbation scaling checks
  unsigned threads = 1;
};

struct ValidationReport {
  ValidationConfig config;
  std::vector<ValidationCheck> checks;
  bool all_passed() const;
};

/// Spiked matrix in a random frame: Γ [Ω₁₁, tEᵀ; tE, tΩ₂₂] Γᵀ with
/// Ω₁₁ having eigenvalues `spikes`, ‖E‖₂ = coupling and Ω₂₂'s spectrum
/// uniform on [0.5, 1.5]. `scale` is t.
struct PerturbInstance {
  Matrix gamma;
  Matrix omega11;
  Matrix coupling;  // E
  Matrix bulk;      // Ω₂₂ before scaling
  SymMatrix sigma(double scale) const;
};

PerturbInstance make_perturb_instance(int p, const std::vector<double>& spikes, double coupling,
                                      RngStream& stream);

/// |expansion_approx − exact λ_k| / exact λ_k at off-block scale t.
double expansion_relative_residual(const PerturbInstance& inst, double scale, int k);

/// Monte Carlo mean of `draws` Σ draws, summed in draw order so the result
/// does not depend on `threads`.
Matrix monte_carlo_iw_mean(double nu, const SymMatrix& scale, int draws, std::uint64_t seed,
                           unsigned threads);

ValidationReport run_validation(const ValidationConfig& config);

}  // namespace spikecov
