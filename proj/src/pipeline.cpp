#include "spikecov/pipeline.hpp"

#include "spikecov/errors.hpp"
#include "spikecov/sampling.hpp"

namespace spikecov {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::iw: return "iw";
    case Method::iw_pc: return "iw-pc";
    case Method::iw_phc: return "iw-phc";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  if (name == "iw") return Method::iw;
  if (name == "iw-pc") return Method::iw_pc;
  if (name == "iw-phc") return Method::iw_phc;
  throw InvalidConfiguration("unknown method '" + std::string(name) + "'");
}

PipelineResult run_pipeline(const SymMatrix& s, int n, const PipelineConfig& config) {
  const int p = static_cast<int>(s.dim());
  const SymMatrix a = SymMatrix::scaled_identity(p, config.prior.a_scale);
  PipelineResult result;
  result.context = make_correction_context(s, a, n, config.k);
  result.factors = Vector::Ones(config.k);
  const double nu = config.prior.nu_for(p);

  switch (config.method) {
    case Method::iw: {
      result.nus = Vector::Constant(config.k, nu);
      const PosteriorSpec spec = build_posterior(s, n, a, nu);
      result.samples =
          posterior_eigen_draws(spec, config.k, config.draws, config.seed, config.mode, config.draw);
      break;
    }
    case Method::iw_phc: {
      result.nus = Vector::Constant(config.k, nu);
      const PosteriorSpec spec = build_posterior(s, n, a, nu);
      result.factors = posthoc_factors(result.context, nu);
      PosteriorSamples raw =
          posterior_eigen_draws(spec, config.k, config.draws, config.seed, config.mode, config.draw);
      result.samples = scale_draws(raw, result.factors);
      result.raw = std::move(raw);
      break;
    }
    case Method::iw_pc: {
      result.nus.resize(config.k);
      PosteriorSamples merged;
      merged.k = config.k;
      merged.n_draws = config.draws;
      merged.mode = config.mode;
      merged.eigenvalues.resize(config.draws, config.k);
      if (config.draw.eigenvectors) {
        merged.eigenvectors.assign(static_cast<std::size_t>(config.draws), Matrix(p, config.k));
      }
      const RngStream root(config.seed, 0);
      for (int k = 1; k <= config.k; ++k) {
        const double nu_k = calibrate_nu(result.context, k);
        result.nus(k - 1) = nu_k;
        const PosteriorSpec spec = build_posterior(s, n, a, nu_k);
        const PosteriorSamples part = posterior_eigen_draws(
            spec, k, config.draws, root.derive_seed(static_cast<std::uint64_t>(k)), config.mode,
            config.draw);
        merged.eigenvalues.col(k - 1) = part.eigenvalues.col(k - 1);
        merged.extrapolated |= part.extrapolated;
        for (int j = 0; j < config.draws && config.draw.eigenvectors; ++j) {
          merged.eigenvectors[static_cast<std::size_t>(j)].col(k - 1) = part.vectors_for(j).col(k - 1);
        }
      }
      enforce_descending(merged);
      result.samples = std::move(merged);
      break;
    }
  }
  return result;
}

}  // namespace spikecov
