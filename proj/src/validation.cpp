#include "spikecov/validation.hpp"

#include "spikecov/errors.hpp"
#include "spikecov/parallel.hpp"
#include "spikecov/posterior.hpp"
#include "spikecov/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace spikecov {

namespace {

constexpr std::size_t kBlock = 1000;

SymMatrix random_spd(int p, RngStream& stream) {
  Matrix g(p, p);
  for (Index i = 0; i < p; ++i) {
    for (Index j = 0; j < p; ++j) g(i, j) = stream.normal();
  }
  Matrix a = g * g.transpose() / p;
  a.diagonal().array() += 1.0;
  return SymMatrix::symmetrize(a);
}

// Draw sums are accumulated in fixed blocks of draws, then the blocks are
// added in order, so the result is independent of worker count.
template <class DrawFn>
Matrix blocked_mean(int p, int draws, unsigned threads, DrawFn&& draw) {
  const std::size_t blocks = (static_cast<std::size_t>(draws) + kBlock - 1) / kBlock;
  std::vector<Matrix> partial(blocks, Matrix::Zero(p, p));
  parallel_for(blocks, threads, [&](std::size_t b) {
    const std::size_t end = std::min(static_cast<std::size_t>(draws), (b + 1) * kBlock);
    for (std::size_t j = b * kBlock; j < end; ++j) partial[b] += draw(j);
  });
  Matrix total = Matrix::Zero(p, p);
  for (const Matrix& m : partial) total += m;
  return total / draws;
}

ValidationCheck make_check(std::string name, double value, double threshold, bool passed,
                           std::string detail) {
  return ValidationCheck{std::move(name), value, threshold, passed, std::move(detail)};
}

ValidationCheck check_iw_mean(const ValidationConfig& cfg) {
  const int p = 5;
  const double nu = 2.0 * p + 6.0;
  RngStream setup(cfg.seed, 0);
  const SymMatrix a = random_spd(p, setup);
  const Matrix mc = monte_carlo_iw_mean(nu, a, cfg.draws, setup.derive_seed(1), cfg.threads);
  const Matrix expected = a.matrix() / (nu - 2.0 * p - 2.0);
  const double rel = (mc - expected).norm() / expected.norm();
  std::ostringstream detail;
  detail << "p=" << p << " nu=" << nu << " draws=" << cfg.draws;
  return make_check("iw_mean", rel, 0.03, rel <= 0.03, detail.str());
}

ValidationCheck check_wishart_mean(const ValidationConfig& cfg) {
  const int p = 4;
  const double df = 10.0;
  RngStream setup(cfg.seed, 1);
  const SymMatrix scale = random_spd(p, setup);
  const std::uint64_t seed = setup.derive_seed(1);
  const Matrix mc = blocked_mean(p, cfg.draws, cfg.threads, [&](std::size_t j) {
    RngStream s(seed, j);
    return wishart_draw(df, scale, s).matrix();
  });
  const Matrix expected = df * scale.matrix();
  const double rel = (mc - expected).norm() / expected.norm();
  std::ostringstream detail;
  detail << "p=" << p << " df=" << df << " draws=" << cfg.draws;
  return make_check("wishart_mean", rel, 0.03, rel <= 0.03, detail.str());
}

ValidationCheck check_offblock_expectation(const ValidationConfig& cfg) {
  const int p = 20;
  const int n = 50;
  const int k = 2;
  const int draws = std::max(4000, cfg.draws / 10);
  RngStream setup(cfg.seed, 2);
  Setting1Config sc;
  sc.n = n;
  sc.p = p;
  sc.spikes = {40.0, 20.0};
  const SyntheticData data = gen_setting1(sc, setup);
  const SymMatrix s = sample_covariance(data.x);
  const PosteriorSpec spec = build_posterior(s, n, SymMatrix::scaled_identity(p, 0.1), 2.0 * p + 2.0);
  const Matrix& gamma = spec.sigma_hat_eigen.vectors;
  const std::uint64_t seed = setup.derive_seed(1);

  Matrix sums = Matrix::Zero(k, 1);
  std::vector<Vector> per_draw(static_cast<std::size_t>(draws));
  parallel_for(per_draw.size(), cfg.threads, [&](std::size_t j) {
    RngStream st(seed, j);
    const Matrix rotated = gamma.transpose() * draw_sigma(spec, st).matrix() * gamma;
    per_draw[j] = rotated.bottomLeftCorner(p - k, k).colwise().squaredNorm().transpose();
  });
  for (const Vector& v : per_draw) sums += v;
  const Vector mc = sums.col(0) / draws;
  const Vector expected = expected_offblock_norms(spec, k);
  double worst = 0.0;
  for (int i = 0; i < k; ++i) worst = std::max(worst, std::abs(mc(i) - expected(i)) / expected(i));
  std::ostringstream detail;
  detail << "p=" << p << " n=" << n << " K=" << k << " draws=" << draws;
  return make_check("offblock_expectation", worst, 0.05, worst <= 0.05, detail.str());
}

ValidationCheck check_block_reassembly(const ValidationConfig& cfg) {
  RngStream st(cfg.seed, 3);
  const int p = 8;
  const SymMatrix sigma = random_spd(p, st);
  const Matrix gamma = random_orthogonal(p, st);
  const BlockDecomposition bd = block_decompose(sigma, gamma, 3);
  const Matrix target = gamma.transpose() * sigma.matrix() * gamma;
  const double err = (bd.assemble() - target).cwiseAbs().maxCoeff();
  return make_check("block_reassembly", err, 1e-10, err <= 1e-10, "p=8 K=3");
}

ValidationCheck check_exact_frame(const ValidationConfig& cfg) {
  RngStream st(cfg.seed, 4);
  const PerturbInstance inst = make_perturb_instance(20, {100.0, 50.0}, 0.5, st);
  const SymMatrix sigma = inst.sigma(1.0);
  const EigenDecomposition eig = sym_eigen(sigma);
  const BlockDecomposition bd = block_decompose(sigma, eig.vectors, 2);
  double worst = 0.0;
  for (int k = 1; k <= 2; ++k) {
    const double exact = eig.values(k - 1);
    worst = std::max(worst, std::abs(expansion_approx(bd, k).approx - exact) / exact);
  }
  return make_check("exact_frame", worst, 1e-10, worst <= 1e-10, "p=20 K=2");
}

ValidationCheck check_cubic_scaling(const ValidationConfig& cfg) {
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < cfg.instances; ++i) {
    RngStream st(cfg.seed, 100 + static_cast<std::uint64_t>(i));
    const PerturbInstance inst = make_perturb_instance(20, {100.0, 50.0}, 0.5, st);
    for (int k = 1; k <= 2; ++k) {
      const double full = expansion_relative_residual(inst, 1.0, k);
      const double half = expansion_relative_residual(inst, 0.5, k);
      worst = std::min(worst, full / half);
    }
  }
  std::ostringstream detail;
  detail << "instances=" << cfg.instances << " p=20 K=2; value is the smallest shrink ratio";
  return make_check("cubic_scaling", worst, 4.0, worst >= 4.0, detail.str());
}

}  // namespace

bool ValidationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const ValidationCheck& c) { return c.passed; });
}

SymMatrix PerturbInstance::sigma(double scale) const {
  const Index k = omega11.rows();
  const Index p = gamma.rows();
  Matrix m = Matrix::Zero(p, p);
  m.topLeftCorner(k, k) = omega11;
  m.bottomLeftCorner(p - k, k) = scale * coupling;
  m.topRightCorner(k, p - k) = scale * coupling.transpose();
  m.bottomRightCorner(p - k, p - k) = scale * bulk;
  return SymMatrix::symmetrize(gamma * m * gamma.transpose());
}

PerturbInstance make_perturb_instance(int p, const std::vector<double>& spikes, double coupling,
                                      RngStream& stream) {
  const int k = static_cast<int>(spikes.size());
  if (k < 1 || k >= p) throw InvalidConfiguration("make_perturb_instance: need 1 <= K < p");
  PerturbInstance inst;
  inst.gamma = random_orthogonal(p, stream);
  const Matrix q = random_orthogonal(k, stream);
  Vector s(k);
  for (int i = 0; i < k; ++i) s(i) = spikes[static_cast<std::size_t>(i)];
  inst.omega11 = q * s.asDiagonal() * q.transpose();
  inst.omega11 = 0.5 * (inst.omega11 + inst.omega11.transpose()).eval();

  Matrix e(p - k, k);
  for (Index i = 0; i < e.rows(); ++i) {
    for (Index j = 0; j < k; ++j) e(i, j) = stream.normal();
  }
  Eigen::JacobiSVD<Matrix> svd(e);
  inst.coupling = e * (coupling / svd.singularValues()(0));

  const Matrix r = random_orthogonal(p - k, stream);
  Vector d(p - k);
  for (Index i = 0; i < d.size(); ++i) d(i) = 0.5 + stream.uniform();
  inst.bulk = r * d.asDiagonal() * r.transpose();
  inst.bulk = 0.5 * (inst.bulk + inst.bulk.transpose()).eval();
  return inst;
}

double expansion_relative_residual(const PerturbInstance& inst, double scale, int k) {
  const SymMatrix sigma = inst.sigma(scale);
  const double exact = sym_eigenvalues(sigma)(k - 1);
  const BlockDecomposition bd = block_decompose(sigma, inst.gamma, static_cast<int>(inst.omega11.rows()));
  return std::abs(expansion_approx(bd, k).approx - exact) / exact;
}

Matrix monte_carlo_iw_mean(double nu, const SymMatrix& scale, int draws, std::uint64_t seed,
                           unsigned threads) {
  if (draws < 1) throw InvalidConfiguration("monte_carlo_iw_mean: draws must be positive");
  const InverseWishartSampler sampler(nu, scale);
  return blocked_mean(static_cast<int>(scale.dim()), draws, threads, [&](std::size_t j) {
    RngStream s(seed, j);
    return sampler.draw(s).matrix();
  });
}

ValidationReport run_validation(const ValidationConfig& config) {
  if (config.draws < 100) throw InvalidConfiguration("validate: draws must be >= 100");
  if (config.instances < 1) throw InvalidConfiguration("validate: instances must be >= 1");
  ValidationReport report;
  report.config = config;
  report.checks.push_back(check_iw_mean(config));
  report.checks.push_back(check_wishart_mean(config));
  report.checks.push_back(check_offblock_expectation(config));
  report.checks.push_back(check_block_reassembly(config));
  report.checks.push_back(check_exact_frame(config));
  report.checks.push_back(check_cubic_scaling(config));
  return report;
}

}  // namespace spikecov
