#include "spikecov/sampling.hpp"

#include "spikecov/errors.hpp"

#include <cmath>
#include <sstream>

namespace spikecov {

namespace {

std::mt19937_64 make_engine(std::uint64_t master_seed, std::uint64_t draw_index) {
  const std::uint64_t a = mix_seed(master_seed);
  const std::uint64_t b = mix_seed(draw_index ^ 0x9E3779B97F4A7C15ULL);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

SymMatrix gram_lower(const Matrix& g) {
  const Index p = g.rows();
  Matrix out = Matrix::Zero(p, p);
  out.selfadjointView<Eigen::Lower>().rankUpdate(g);
  out.triangularView<Eigen::StrictlyUpper>() = out.transpose();
  return SymMatrix(std::move(out));
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t draw_index)
    : master_seed_(master_seed),
      draw_index_(draw_index),
      engine_(make_engine(master_seed, draw_index)) {}

std::uint64_t RngStream::derive_seed(std::uint64_t salt) const {
  return mix_seed(mix_seed(master_seed_) ^ mix_seed(draw_index_ + 0x632BE59BD9B4E019ULL) ^
                  mix_seed(salt ^ 0xD1B54A32D192ED03ULL));
}

double RngStream::normal() { return normal_(engine_); }

double RngStream::uniform() {
  return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
}

double RngStream::gamma(double shape, double rate) {
  return std::gamma_distribution<double>(shape, 1.0 / rate)(engine_);
}

double RngStream::chi_square(double df) { return gamma(0.5 * df, 0.5); }

Matrix bartlett_factor(Index p, double df, RngStream& stream) {
  Matrix z = Matrix::Zero(p, p);
  for (Index i = 0; i < p; ++i) {
    z(i, i) = std::sqrt(stream.chi_square(df - static_cast<double>(i)));
  }
  for (Index i = 1; i < p; ++i) {
    for (Index j = 0; j < i; ++j) z(i, j) = stream.normal();
  }
  return z;
}

SymMatrix wishart_draw(double df, const SymMatrix& scale, RngStream& stream) {
  const Index p = scale.dim();
  if (!(df > static_cast<double>(p) - 1.0)) {
    std::ostringstream msg;
    msg << "wishart_draw: invalid degrees of freedom " << df << " for p=" << p
        << " (need df > p - 1)";
    throw InvalidConfiguration(msg.str());
  }
  const Matrix l = cholesky_lower(scale);
  const Matrix z = bartlett_factor(p, df, stream);
  const Matrix g = l.triangularView<Eigen::Lower>() * z;
  return gram_lower(g);
}

InverseWishartSampler::InverseWishartSampler(double nu, const SymMatrix& scale)
    : InverseWishartSampler(nu, scale, Matrix()) {}

InverseWishartSampler::InverseWishartSampler(double nu, const SymMatrix& scale,
                                             Matrix scale_cholesky)
    : nu_(nu), chol_(std::move(scale_cholesky)) {
  const double p = static_cast<double>(scale.dim());
  if (!(nu > 2.0 * p)) {
    std::ostringstream msg;
    msg << "inverse_wishart: invalid degrees of freedom nu=" << nu << " for p=" << p
        << " (need nu > 2p)";
    throw InvalidConfiguration(msg.str());
  }
  if (chol_.size() == 0) chol_ = cholesky_lower(scale);
}

SymMatrix InverseWishartSampler::draw(RngStream& stream) const {
  const Index p = dim();
  const Matrix z = bartlett_factor(p, standard_df(), stream);
  // y = Z⁻¹ Lᵀ, so Σ = yᵀ y = (L Z⁻ᵀ)(L Z⁻ᵀ)ᵀ.
  const Matrix y = z.triangularView<Eigen::Lower>().solve(chol_.transpose());
  return gram_lower(y.transpose());
}

InverseWishartDraw inverse_wishart_draw(double nu, const SymMatrix& scale_a,
                                        RngStream& stream) {
  const InverseWishartSampler sampler(nu, scale_a);
  return {sampler.draw(stream), sampler.mean_undefined()};
}

}  // namespace spikecov
