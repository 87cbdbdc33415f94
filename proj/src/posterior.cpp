#include "spikecov/posterior.hpp"

#include "spikecov/errors.hpp"
#include "spikecov/parallel.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace spikecov {

namespace {

constexpr double kCenterFloor = 1e-12;

void check_k(const PosteriorSpec& spec, int k) {
  if (k < 1 || k > std::min(spec.n, spec.p)) {
    std::ostringstream msg;
    msg << "K=" << k << " outside 1..min(n,p)=" << std::min(spec.n, spec.p);
    throw InvalidConfiguration(msg.str());
  }
}

bool sort_descending(Vector& row) {
  if (std::is_sorted(row.data(), row.data() + row.size(), std::greater<>())) return false;
  std::sort(row.data(), row.data() + row.size(), std::greater<>());
  return true;
}

}  // namespace

PosteriorSpec build_posterior(const SymMatrix& s, int n, const SymMatrix& a, double nu) {
  if (n < 1) throw InvalidConfiguration("build_posterior: n must be >= 1");
  if (s.dim() != a.dim()) throw InvalidConfiguration("build_posterior: S and A differ in dimension");
  const int p = static_cast<int>(s.dim());
  if (!(nu > 2.0 * p)) {
    std::ostringstream msg;
    msg << "build_posterior: prior degrees of freedom nu=" << nu << " must exceed 2p=" << 2 * p;
    throw InvalidConfiguration(msg.str());
  }
  PosteriorSpec spec;
  spec.n = n;
  spec.p = p;
  spec.nu_prior = nu;
  spec.nu_post = nu + n;
  const double denom = spec.center_denominator();
  if (!(denom > 0.0)) {
    throw InvalidConfiguration("build_posterior: n + nu - 2p - 2 must be positive");
  }
  spec.scale = SymMatrix(a.matrix() + static_cast<double>(n) * s.matrix());
  spec.scale_cholesky = cholesky_lower(spec.scale);
  spec.sigma_hat = SymMatrix(spec.scale.matrix() / denom);
  spec.sigma_hat_eigen = sym_eigen(spec.sigma_hat);
  return spec;
}

SymMatrix draw_sigma(const PosteriorSpec& spec, RngStream& stream) {
  const InverseWishartSampler sampler(spec.nu_post, spec.scale, spec.scale_cholesky);
  return sampler.draw(stream);
}

Vector floored_center_eigenvalues(const PosteriorSpec& spec) {
  Vector values = spec.sigma_hat_eigen.values;
  const double floor = kCenterFloor * values(0);
  for (Index i = 0; i < values.size(); ++i) values(i) = std::max(values(i), floor);
  return values;
}

Vector expected_offblock_norms(const PosteriorSpec& spec, int k) {
  check_k(spec, k);
  const Vector lambda = floored_center_eigenvalues(spec);
  Vector out = Vector::Zero(k);
  if (k == spec.p) return out;
  const double d = spec.center_denominator();
  if (!(d - 2.0 > 0.0)) {
    throw InvalidConfiguration(
        "expected_offblock_norms: needs n + nu - 2p - 4 > 0 for a finite second moment");
  }
  const Index bulk = spec.p - k;
  const double bulk_sum = pairwise_sum(lambda.data() + k, static_cast<std::size_t>(bulk));
  for (int i = 0; i < k; ++i) {
    out(i) = d * lambda(i) * bulk_sum / ((d + 1.0) * (d - 2.0));
  }
  return out;
}

Vector topk_fast_draw(const PosteriorSpec& spec, int k, RngStream& stream) {
  check_k(spec, k);
  const double d = spec.center_denominator();
  // Block degrees n + ν − 2p + 2K must exceed 2K.
  const double block_nu = d + 2.0 + 2.0 * k;
  if (!(block_nu > 2.0 * k)) {
    throw InvalidConfiguration("topk_fast_draw: invalid K-block degrees of freedom");
  }
  const Vector lambda = floored_center_eigenvalues(spec);
  const Vector expected = expected_offblock_norms(spec, k);
  const SymMatrix block_scale = SymMatrix::diagonal(d * lambda.head(k));
  const InverseWishartSampler sampler(block_nu, block_scale);
  const Vector omega = sym_eigenvalues(sampler.draw(stream));
  Vector out(k);
  for (int i = 0; i < k; ++i) {
    out(i) = omega(i) * (1.0 + expected(i) / (omega(i) * omega(i)));
  }
  return out;
}

PosteriorSamples posterior_eigen_draws(const PosteriorSpec& spec, int k, int n_draws,
                                       std::uint64_t seed, SamplingMode mode,
                                       const DrawOptions& options) {
  check_k(spec, k);
  if (n_draws < 1) throw InvalidConfiguration("posterior_eigen_draws: need at least one draw");

  PosteriorSamples out;
  out.k = k;
  out.n_draws = n_draws;
  out.mode = mode;
  out.eigenvalues.resize(n_draws, k);
  const auto count = static_cast<std::size_t>(n_draws);

  if (mode == SamplingMode::fast_topk) {
    out.extrapolated = spec.p <= spec.n;
    std::vector<Vector> rows(count);
    parallel_for(count, options.threads, [&](std::size_t j) {
      RngStream stream(seed, j);
      rows[j] = topk_fast_draw(spec, k, stream);
    });
    for (std::size_t j = 0; j < count; ++j) {
      out.reordered |= sort_descending(rows[j]);
      out.eigenvalues.row(static_cast<Index>(j)) = rows[j].transpose();
    }
    if (options.eigenvectors) {
      out.fixed_eigenvectors = true;
      out.eigenvectors.push_back(spec.sigma_hat_eigen.vectors.leftCols(k));
    }
    return out;
  }

  const InverseWishartSampler sampler(spec.nu_post, spec.scale, spec.scale_cholesky);
  out.traces.resize(n_draws);
  if (options.eigenvectors) out.eigenvectors.resize(count);
  std::vector<Vector> rows(count);
  std::vector<double> traces(count);
  parallel_for(count, options.threads, [&](std::size_t j) {
    RngStream stream(seed, j);
    const SymMatrix sigma = sampler.draw(stream);
    traces[j] = sigma.matrix().trace();
    if (options.eigenvectors) {
      EigenDecomposition eig = sym_eigen(sigma);
      rows[j] = eig.values.head(k);
      out.eigenvectors[j] = eig.vectors.leftCols(k);
    } else {
      rows[j] = sym_eigenvalues(sigma).head(k);
    }
  });
  for (std::size_t j = 0; j < count; ++j) {
    out.eigenvalues.row(static_cast<Index>(j)) = rows[j].transpose();
    out.traces(static_cast<Index>(j)) = traces[j];
  }
  return out;
}

}  // namespace spikecov
