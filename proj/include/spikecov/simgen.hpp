#pragma once

#include "spikecov/matrix_core.hpp"
#include "spikecov/sampling.hpp"

#include <vector>

namespace spikecov {

/// Σ₀ = diag(spikes, bulk, …, bulk).
struct Setting1Config {
  int n = 100;
  int p = 200;
  std::vector<double> spikes{150.0, 100.0, 50.0};
  double bulk = 1.0;
};

/// Factor model X = B f + ε with orthogonal loading columns
/// ‖b_k‖² = spike_norms[k] and ε ~ N(0, diag(σ_i²)), σ_i ~ Gamma(a, rate b).
struct Setting2Config {
  int n = 100;
  int p = 200;
  std::vector<double> spike_norms{50.0, 20.0, 10.0};  // ‖b_k‖, so λ_k(BBᵀ) = norm²
  double gamma_a = 150.0;
  double gamma_b = 100.0;
};

struct SyntheticData {
  ObservationMatrix x;
  Vector true_values;   // descending eigenvalues of Σ₀
  Matrix true_vectors;  // matching eigenvectors
  SymMatrix sigma0;
  Matrix loadings;      // setting 2 only: p×K matrix B
};

SyntheticData gen_setting1(const Setting1Config& cfg, RngStream& stream);
SyntheticData gen_setting2(const Setting2Config& cfg, RngStream& stream);

/// Orthonormalizes the columns of `m` in place (modified Gram–Schmidt).
void modified_gram_schmidt(Matrix& m);

/// Haar-distributed p×p orthogonal matrix (Gram–Schmidt of a Gaussian matrix).
Matrix random_orthogonal(int p, RngStream& stream);

}  // namespace spikecov
