#include "spikecov/bias_correction.hpp"

#include "spikecov/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace spikecov {

namespace {

void check_index(const CorrectionContext& ctx, int k) {
  if (k < 1 || k > ctx.k_spikes) {
    std::ostringstream msg;
    msg << "spike index k=" << k << " outside 1.." << ctx.k_spikes;
    throw InvalidConfiguration(msg.str());
  }
}

double tail_sum(const Vector& v, int from) {
  return pairwise_sum(v.data() + from, static_cast<std::size_t>(v.size() - from));
}

}  // namespace

double CorrectionContext::splus_bulk_sum() const { return tail_sum(splus_eigs, k_spikes); }

double hat_c(const Vector& s_eigs, int n, int p, int k_spikes) {
  const double denom = p - k_spikes - static_cast<double>(p) * k_spikes / n;
  if (!(denom > 0.0) || k_spikes >= std::min(n, p)) {
    std::ostringstream msg;
    msg << "K too large for (n,p): K=" << k_spikes << ", n=" << n << ", p=" << p;
    throw InvalidConfiguration(msg.str());
  }
  if (s_eigs.size() != p) throw InvalidConfiguration("hat_c: expected p eigenvalues");
  return std::max(0.0, tail_sum(s_eigs, k_spikes)) / denom;
}

CorrectionContext make_correction_context(Vector s_eigs, Vector splus_eigs, int n, int k_spikes) {
  if (s_eigs.size() != splus_eigs.size()) {
    throw InvalidConfiguration("make_correction_context: spectra differ in length");
  }
  if (k_spikes < 1) throw InvalidConfiguration("make_correction_context: K must be >= 1");
  CorrectionContext ctx;
  ctx.n = n;
  ctx.p = static_cast<int>(s_eigs.size());
  ctx.k_spikes = k_spikes;
  ctx.c_hat = hat_c(s_eigs, n, ctx.p, k_spikes);
  ctx.s_eigs = std::move(s_eigs);
  ctx.splus_eigs = std::move(splus_eigs);
  return ctx;
}

CorrectionContext make_correction_context(const SymMatrix& s, const SymMatrix& a, int n,
                                          int k_spikes) {
  Vector s_eigs = sym_eigenvalues(s);
  Vector splus;
  double shift = 0.0;
  if (a.is_scaled_identity(&shift)) {
    splus = s_eigs.array() + shift / n;
  } else {
    splus = sym_eigenvalues(SymMatrix(s.matrix() + a.matrix() / n));
  }
  return make_correction_context(std::move(s_eigs), std::move(splus), n, k_spikes);
}

double gamma2(double lambda_k_s, double c_hat, int n, int p) {
  return 1.0 - c_hat * p / (n * lambda_k_s);
}

double gamma1_tilde(const CorrectionContext& ctx, double nu, int k) {
  check_index(ctx, k);
  const double d = ctx.n + nu - 2.0 * ctx.p - 2.0;
  if (!(d > 0.0)) throw InvalidConfiguration("gamma1_tilde: n + nu - 2p - 2 must be positive");
  const double lambda_s = ctx.s_eigs(k - 1);
  if (lambda_s == 0.0) throw NumericalFailure("gamma1_tilde: lambda_k(S) is zero");
  const double lambda_plus = ctx.splus_eigs(k - 1);
  return (ctx.n / d) * (lambda_plus / lambda_s) *
         (1.0 + ctx.splus_bulk_sum() / (d * lambda_plus));
}

double calibrate_nu(const CorrectionContext& ctx, int k) {
  check_index(ctx, k);
  const double n = ctx.n;
  const double lambda_s = ctx.s_eigs(k - 1);
  const double gap = n * lambda_s - ctx.c_hat * ctx.p;
  if (!(gap > 0.0)) {
    std::ostringstream msg;
    msg << "spike not separable at index k=" << k << " (n*lambda_k(S) <= c_hat*p)";
    throw CorrectionInfeasible(msg.str(), {k});
  }
  const double lambda_plus = ctx.splus_eigs(k - 1);
  const double bulk_plus = ctx.splus_bulk_sum();
  double disc = (n * lambda_plus) * (n * lambda_plus) + 4.0 * gap * bulk_plus;
  if (disc < 0.0) {
    if (disc < -1e-12 * (n * lambda_plus) * (n * lambda_plus)) {
      throw NumericalFailure("calibrate_nu: negative discriminant");
    }
    disc = 0.0;
  }
  const double nu = (n * lambda_plus + std::sqrt(disc)) / (2.0 * gap / n) - n + 2.0 * ctx.p + 2.0;
  if (!(nu > 2.0 * ctx.p)) {
    std::ostringstream msg;
    msg << "calibration infeasible at k=" << k << ": nu=" << nu << " <= 2p";
    throw CorrectionInfeasible(msg.str(), {k});
  }
  return nu;
}

Vector posthoc_factors(const CorrectionContext& ctx, double nu) {
  Vector factors(ctx.k_spikes);
  std::vector<int> bad;
  for (int k = 1; k <= ctx.k_spikes; ++k) {
    const double g2 = gamma2(ctx.s_eigs(k - 1), ctx.c_hat, ctx.n, ctx.p);
    const double g1 = gamma1_tilde(ctx, nu, k);
    factors(k - 1) = g2 / g1;
    if (!(factors(k - 1) > 0.0)) bad.push_back(k);
  }
  if (!bad.empty()) {
    std::ostringstream msg;
    msg << "correction infeasible at index";
    for (int k : bad) {
      msg << " k=" << k << " (gamma2=" << gamma2(ctx.s_eigs(k - 1), ctx.c_hat, ctx.n, ctx.p)
          << ")";
    }
    throw CorrectionInfeasible(msg.str(), bad);
  }
  return factors;
}

bool enforce_descending(PosteriorSamples& samples) {
  bool any = false;
  const auto k = static_cast<std::size_t>(samples.k);
  std::vector<int> order(k);
  for (int j = 0; j < samples.n_draws; ++j) {
    const Vector row = samples.eigenvalues.row(j).transpose();
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return row(a) > row(b); });
    if (std::is_sorted(order.begin(), order.end())) continue;
    any = true;
    for (std::size_t c = 0; c < k; ++c) samples.eigenvalues(j, static_cast<Index>(c)) = row(order[c]);
    if (samples.has_eigenvectors() && !samples.fixed_eigenvectors) {
      Matrix& vectors = samples.eigenvectors[static_cast<std::size_t>(j)];
      const Matrix src = vectors;
      for (std::size_t c = 0; c < k; ++c) vectors.col(static_cast<Index>(c)) = src.col(order[c]);
    }
  }
  samples.reordered |= any;
  return any;
}

PosteriorSamples scale_draws(const PosteriorSamples& samples, const Vector& factors) {
  if (factors.size() != samples.k) throw InvalidConfiguration("scale_draws: factor count != K");
  PosteriorSamples out = samples;
  out.adjusted = true;
  for (int j = 0; j < out.n_draws; ++j) {
    out.eigenvalues.row(j) = out.eigenvalues.row(j).cwiseProduct(factors.transpose());
  }
  enforce_descending(out);
  return out;
}

PosteriorSamples posthoc_adjust(const PosteriorSamples& samples, const CorrectionContext& ctx,
                                double nu) {
  if (samples.k > ctx.k_spikes) {
    throw InvalidConfiguration("posthoc_adjust: samples carry more spikes than the context");
  }
  Vector factors = posthoc_factors(ctx, nu).head(samples.k);
  return scale_draws(samples, factors);
}

}  // namespace spikecov
