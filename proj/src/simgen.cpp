#include "spikecov/simgen.hpp"

#include "spikecov/errors.hpp"

#include <cmath>

namespace spikecov {

namespace {

void require_descending_positive(const std::vector<double>& v, const char* what) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0)) throw InvalidConfiguration(std::string(what) + ": entries must be positive");
    if (i > 0 && !(v[i] <= v[i - 1])) {
      throw InvalidConfiguration(std::string(what) + ": entries must be descending");
    }
  }
}

Matrix standard_normal(Index rows, Index cols, RngStream& stream) {
  Matrix z(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) z(i, j) = stream.normal();
  }
  return z;
}

// Truth spikes must strictly descend and stay above the bulk.
void check_truth_ordering(const Vector& values, std::size_t k) {
  for (std::size_t i = 0; i < k; ++i) {
    const auto ii = static_cast<Index>(i);
    if (ii + 1 < values.size() && !(values(ii) > values(ii + 1))) {
      throw InvalidConfiguration("synthetic truth: spiked eigenvalues are not strictly separated");
    }
  }
}

}  // namespace

void modified_gram_schmidt(Matrix& m) {
  for (Index k = 0; k < m.cols(); ++k) {
    for (Index j = 0; j < k; ++j) m.col(k) -= m.col(j).dot(m.col(k)) * m.col(j);
    const double norm = m.col(k).norm();
    if (!(norm > 0.0)) throw NumericalFailure("modified_gram_schmidt: rank-deficient input");
    m.col(k) /= norm;
  }
}

Matrix random_orthogonal(int p, RngStream& stream) {
  if (p < 1) throw InvalidConfiguration("random_orthogonal: p must be positive");
  Matrix q = standard_normal(p, p, stream);
  modified_gram_schmidt(q);
  return q;
}

SyntheticData gen_setting1(const Setting1Config& cfg, RngStream& stream) {
  if (cfg.n < 1 || cfg.p < 1) throw InvalidConfiguration("setting 1: need n, p >= 1");
  if (static_cast<int>(cfg.spikes.size()) > cfg.p) {
    throw InvalidConfiguration("setting 1: more spikes than dimensions");
  }
  require_descending_positive(cfg.spikes, "setting 1 spikes");
  if (!(cfg.bulk > 0.0)) throw InvalidConfiguration("setting 1: bulk must be positive");
  if (!cfg.spikes.empty() && !(cfg.spikes.back() > cfg.bulk)) {
    throw InvalidConfiguration("setting 1: spikes must exceed the bulk level");
  }

  Vector diag = Vector::Constant(cfg.p, cfg.bulk);
  for (std::size_t i = 0; i < cfg.spikes.size(); ++i) diag(static_cast<Index>(i)) = cfg.spikes[i];
  const Vector sd = diag.cwiseSqrt();

  Matrix x = standard_normal(cfg.n, cfg.p, stream);
  x = x * sd.asDiagonal();

  SyntheticData out{ObservationMatrix(std::move(x)), diag, Matrix::Identity(cfg.p, cfg.p),
                    SymMatrix::diagonal(diag), Matrix()};
  check_truth_ordering(out.true_values, cfg.spikes.size());
  return out;
}

SyntheticData gen_setting2(const Setting2Config& cfg, RngStream& stream) {
  const int k = static_cast<int>(cfg.spike_norms.size());
  if (cfg.n < 1 || cfg.p < 1) throw InvalidConfiguration("setting 2: need n, p >= 1");
  if (cfg.p < k) throw InvalidConfiguration("setting 2: p < K");
  require_descending_positive(cfg.spike_norms, "setting 2 spike norms");
  if (!(cfg.gamma_a > 0.0 && cfg.gamma_b > 0.0)) {
    throw InvalidConfiguration("setting 2: gamma parameters must be positive");
  }

  // Σ_u is drawn once per data set.
  Vector idio(cfg.p);
  for (int i = 0; i < cfg.p; ++i) {
    const double sigma = stream.gamma(cfg.gamma_a, cfg.gamma_b);
    idio(i) = sigma * sigma;
  }

  Matrix b = standard_normal(cfg.p, k, stream);
  if (k > 0) {
    modified_gram_schmidt(b);
    for (int j = 0; j < k; ++j) b.col(j) *= cfg.spike_norms[static_cast<std::size_t>(j)];
  }

  const Matrix f = standard_normal(cfg.n, k, stream);
  Matrix eps = standard_normal(cfg.n, cfg.p, stream);
  eps = eps * idio.cwiseSqrt().asDiagonal();
  Matrix x = eps;
  if (k > 0) x.noalias() += f * b.transpose();

  Matrix sigma0 = b * b.transpose();
  sigma0.diagonal() += idio;
  SymMatrix sigma0_sym = SymMatrix::symmetrize(sigma0);
  EigenDecomposition truth = sym_eigen(sigma0_sym);
  check_truth_ordering(truth.values, static_cast<std::size_t>(k));
  return {ObservationMatrix(std::move(x)), std::move(truth.values), std::move(truth.vectors),
          std::move(sigma0_sym), std::move(b)};
}

}  // namespace spikecov
