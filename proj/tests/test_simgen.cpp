#include "doctest.h"

#include "spikecov/errors.hpp"
#include "spikecov/experiment.hpp"
#include "spikecov/report_io.hpp"
#include "spikecov/simgen.hpp"

#include <cmath>
#include <sstream>

using namespace spikecov;

TEST_CASE("setting 1 without spikes is standard normal") {
  Setting1Config cfg;
  cfg.n = 20000;
  cfg.p = 3;
  cfg.spikes = {};
  RngStream st(1, 0);
  const SyntheticData d = gen_setting1(cfg, st);
  const Matrix s = sample_covariance(d.x).matrix();
  CHECK((s - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() <= 0.04);
  CHECK(d.true_values == Vector::Ones(3));
}

TEST_CASE("setting 1 default truth and law of large numbers") {
  RngStream st(2, 0);
  const SyntheticData d = gen_setting1(Setting1Config{}, st);
  CHECK(d.x.n() == 100);
  CHECK(d.x.p() == 200);
  CHECK(d.true_values(0) == 150.0);
  CHECK(d.true_values(1) == 100.0);
  CHECK(d.true_values(2) == 50.0);
  CHECK(d.true_values(3) == 1.0);
  CHECK(d.true_vectors == Matrix::Identity(200, 200));

  Setting1Config small;
  small.n = 100000;
  small.p = 5;
  small.spikes = {10, 4};
  RngStream st2(3, 0);
  const SyntheticData big = gen_setting1(small, st2);
  const Matrix s = sample_covariance(big.x).matrix();
  for (int i = 0; i < 5; ++i) {
    CHECK(std::abs(s(i, i) - big.sigma0(i, i)) <= 0.03 * big.sigma0(i, i));
  }
  // Off-diagonal truth is zero, so compare against the scale of the diagonal.
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < i; ++j) CHECK(std::abs(s(i, j)) <= 0.03 * std::sqrt(s(i, i) * s(j, j)));
  }
}

TEST_CASE("setting 1 validation") {
  Setting1Config cfg;
  cfg.spikes = {50, 100};
  RngStream st(4, 0);
  CHECK_THROWS_AS(gen_setting1(cfg, st), InvalidConfiguration);
  cfg.spikes = {100, 0.5};
  CHECK_THROWS_AS(gen_setting1(cfg, st), InvalidConfiguration);
}

TEST_CASE("setting 2 structure") {
  Setting2Config cfg;
  RngStream st(5, 0);
  const SyntheticData d = gen_setting2(cfg, st);
  REQUIRE(d.loadings.cols() == 3);
  for (int k = 0; k < 3; ++k) {
    CHECK(d.loadings.col(k).norm() == doctest::Approx(cfg.spike_norms[static_cast<std::size_t>(k)]).epsilon(1e-12));
    for (int l = 0; l < k; ++l) {
      CHECK(std::abs(d.loadings.col(k).dot(d.loadings.col(l))) <=
            1e-8 * d.loadings.col(k).norm() * d.loadings.col(l).norm());
    }
  }
  for (int k = 1; k < 4; ++k) CHECK(d.true_values(k - 1) > d.true_values(k));
  // spikes sit at norm² plus an idiosyncratic share of about 2.25
  CHECK(d.true_values(0) == doctest::Approx(2502.25).epsilon(0.002));
  CHECK(d.true_values(2) == doctest::Approx(102.25).epsilon(0.01));
  const Matrix bbt = d.loadings * d.loadings.transpose();
  const Vector idio = d.sigma0.matrix().diagonal() - bbt.diagonal();
  CHECK(idio.minCoeff() > 0.0);
  CHECK(idio.array().sqrt().mean() == doctest::Approx(1.5).epsilon(0.02));
}

TEST_CASE("setting 2 with K=0 is diagonal noise") {
  Setting2Config cfg;
  cfg.spike_norms = {};
  cfg.p = 10;
  RngStream st(6, 0);
  const SyntheticData d = gen_setting2(cfg, st);
  const Matrix off = d.sigma0.matrix() - Matrix(d.sigma0.matrix().diagonal().asDiagonal());
  CHECK(off.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("setting 2 covariance law of large numbers (p=6, K=2)") {
  Setting2Config cfg;
  cfg.n = 100000;
  cfg.p = 6;
  cfg.spike_norms = {8, 4};
  RngStream st(7, 0);
  const SyntheticData d = gen_setting2(cfg, st);
  const Matrix s = sample_covariance(d.x).matrix();
  const Matrix& t = d.sigma0.matrix();
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      CAPTURE(i);
      CAPTURE(j);
      CHECK(std::abs(s(i, j) - t(i, j)) <= 0.03 * std::sqrt(t(i, i) * t(j, j)));
    }
  }
}

TEST_CASE("setting 2 validation") {
  Setting2Config cfg;
  cfg.p = 2;
  RngStream st(8, 0);
  CHECK_THROWS_AS(gen_setting2(cfg, st), InvalidConfiguration);
}

TEST_CASE("random_orthogonal") {
  RngStream st(9, 0);
  const Matrix q = random_orthogonal(7, st);
  CHECK((q.transpose() * q - Matrix::Identity(7, 7)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("experiment config parsing") {
  std::istringstream in(
      "# tiny study\n"
      "setting = 1\n"
      "n = 30\n"
      "p = 10\n"
      "spikes = 20, 8\n"
      "replications = 2\n"
      "draws = 10   # few\n"
      "methods = sample, iw, iw-pc, iw-phc\n"
      "seed = 5\n");
  const ExperimentConfig cfg = parse_experiment_config(in);
  CHECK(cfg.n() == 30);
  CHECK(cfg.p() == 10);
  CHECK(cfg.true_k() == 2);
  CHECK(cfg.draws == 10);
  CHECK(cfg.seed == 5);
  CHECK(cfg.estimators.size() == 4);

  std::istringstream unknown("n = 30\nbogus = 1\n");
  CHECK_THROWS_WITH_AS(parse_experiment_config(unknown), doctest::Contains("unknown key"), InvalidConfiguration);
  std::istringstream bad_number("n = thirty\n");
  CHECK_THROWS_AS(parse_experiment_config(bad_number), InvalidConfiguration);
  std::istringstream one_rep("replications = 1\n");
  CHECK_THROWS_AS(parse_experiment_config(one_rep), InvalidConfiguration);
  std::istringstream dup("methods = iw, iw\n");
  CHECK_THROWS_AS(parse_experiment_config(dup), InvalidConfiguration);
}

namespace {

ExperimentConfig tiny_config() {
  ExperimentConfig cfg;
  cfg.setting1.n = 30;
  cfg.setting1.p = 10;
  cfg.setting1.spikes = {20, 8};
  cfg.replications = 2;
  cfg.draws = 10;
  cfg.seed = 3;
  cfg.eigenvectors = true;
  return cfg;
}

}  // namespace

TEST_CASE("tiny experiment populates every field") {
  const ExperimentReport r = run_experiment(tiny_config());
  CHECK(r.completed == 2);
  CHECK(r.failed.empty());
  REQUIRE(r.records.size() == 2);
  for (const ReplicationRecord& rec : r.records) {
    CHECK(rec.ok);
    CHECK(rec.methods.size() == 4);
    CHECK(rec.pc_nus.size() == 2);
    CHECK(rec.phc_factors.size() == 2);
    CHECK(rec.map_k >= 1);
    for (const MethodOutcome& m : rec.methods) {
      CHECK(m.estimate.size() == 2);
      CHECK(m.vector_error.size() == 2);
      if (m.estimator != Estimator::sample) CHECK(m.ci_low.size() == 2);
    }
  }
  REQUIRE(r.methods.size() == 4);
  CHECK(std::isnan(r.find(Estimator::sample)->cp[0]));
  const MethodSummary* phc = r.find(Estimator::iw_phc);
  REQUIRE(phc != nullptr);
  for (double cp : phc->cp) {
    CHECK(cp >= 0.0);
    CHECK(cp <= 1.0);
  }
  CHECK(r.spike_acc >= 0.0);
  CHECK(r.spike_acc <= 1.0);
}

TEST_CASE("experiments are deterministic and thread-invariant") {
  const ExperimentConfig cfg = tiny_config();
  const std::string a = dump_json(to_json(run_experiment(cfg, 1)));
  const std::string b = dump_json(to_json(run_experiment(cfg, 1)));
  const std::string c = dump_json(to_json(run_experiment(cfg, 4)));
  CHECK(a == b);
  CHECK(a == c);
}

TEST_CASE("replication failures are recorded, not fatal") {
  ExperimentConfig cfg = tiny_config();
  // K = 6 leaves p - K - pK/n < 0, so every correction context fails.
  cfg.setting1.n = 12;
  cfg.setting1.spikes = {60, 50, 40, 30, 20, 10};
  cfg.estimators = {Estimator::sample, Estimator::iw_phc};
  const ExperimentReport r = run_experiment(cfg);
  CHECK(r.completed == 0);
  CHECK(r.failed == std::vector<int>{0, 1});
  for (const ReplicationRecord& rec : r.records) {
    CHECK_FALSE(rec.ok);
    CHECK(rec.error.find("K too large") != std::string::npos);
  }
  CHECK(std::isnan(r.find(Estimator::iw_phc)->err_mean[0]));
  CHECK(std::isnan(r.spike_acc));
}

TEST_CASE("setting 2 reports carry the redraw note") {
  ExperimentConfig cfg;
  cfg.setting = 2;
  cfg.setting2.n = 30;
  cfg.setting2.p = 20;
  cfg.replications = 2;
  cfg.draws = 5;
  cfg.estimators = {Estimator::sample};
  const ExperimentReport r = run_experiment(cfg);
  CHECK_FALSE(r.notes.empty());
}
