// Acceptance suite: prints one PASS/FAIL line per criterion.
// Usage: acceptance <path to spikecov CLI> [--expect-fail N]...
// Exits non-zero unless the failing criteria are exactly the ones listed
// with --expect-fail.

#include "oracles.hpp"

#include "spikecov/absorption.hpp"
#include "spikecov/eigen_inference.hpp"
#include "spikecov/experiment.hpp"
#include "spikecov/posterior.hpp"
#include "spikecov/spike_count.hpp"
#include "spikecov/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

using namespace spikecov;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(4);
  out << v;
  return out.str();
}

// 1. Inverse-Wishart moment
Outcome sampler_moment() {
  const int p = 5;
  const double nu = 2.0 * p + 6.0;
  Matrix a_dense(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) a_dense(i, j) = std::pow(0.5, std::abs(i - j)) * (1.0 + 0.2 * i);
  }
  a_dense = 0.5 * (a_dense + a_dense.transpose()).eval();
  const SymMatrix a(a_dense);
  const auto start = Clock::now();
  const Matrix mc = monte_carlo_iw_mean(nu, a, 50000, 101, 1);
  const double elapsed = seconds_since(start);
  const Matrix expected = a.matrix() / (nu - 2.0 * p - 2.0);
  const double rel = (mc - expected).norm() / expected.norm();
  return {rel <= 0.03 && elapsed < 60.0,
          "rel_frobenius=" + fmt(rel) + " (<= 0.03), runtime=" + fmt(elapsed) + "s (< 60)"};
}

// 2. Off-block posterior expectation
Outcome offblock_expectation() {
  const int n = 100;
  const int p = 50;
  const int k = 3;
  const int draws = 5000;
  RngStream setup(202, 0);
  Setting1Config sc;
  sc.n = n;
  sc.p = p;
  const SyntheticData data = gen_setting1(sc, setup);
  const PosteriorSpec spec =
      build_posterior(sample_covariance(data.x), n, SymMatrix::scaled_identity(p, 0.1), 2.0 * p + 2.0);
  const Matrix& gamma = spec.sigma_hat_eigen.vectors;
  const Vector& lam = spec.sigma_hat_eigen.values;
  const double d = n + spec.nu_prior - 2.0 * p - 2.0;
  double tail = 0.0;
  for (int l = k; l < p; ++l) tail += lam(l);

  std::vector<long double> sums(k, 0.0L);
  const std::uint64_t seed = setup.derive_seed(7);
  for (int j = 0; j < draws; ++j) {
    RngStream st(seed, static_cast<std::uint64_t>(j));
    const Matrix omega = gamma.transpose() * draw_sigma(spec, st).matrix() * gamma;
    for (int i = 0; i < k; ++i) sums[static_cast<std::size_t>(i)] += omega.col(i).tail(p - k).squaredNorm();
  }
  bool ok = true;
  std::string detail;
  for (int i = 0; i < k; ++i) {
    const double closed = d * lam(i) * tail / ((d + 1.0) * (d - 2.0));
    const double mc = static_cast<double>(sums[static_cast<std::size_t>(i)] / draws);
    const double rel = std::abs(mc - closed) / closed;
    ok = ok && rel <= 0.05;
    detail += "k=" + std::to_string(i + 1) + " rel=" + fmt(rel) + " ";
  }
  return {ok, detail + "(each <= 0.05)"};
}

// 3. Cubic residual scaling of the perturbation expansion
Outcome cubic_scaling() {
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 20; ++i) {
    RngStream st(303, static_cast<std::uint64_t>(i));
    const PerturbInstance inst = make_perturb_instance(20, {100.0, 50.0}, 0.5, st);
    for (int k = 1; k <= 2; ++k) {
      const double full = expansion_relative_residual(inst, 1.0, k);
      const double half = expansion_relative_residual(inst, 0.5, k);
      worst = std::min(worst, full / half);
    }
  }
  return {worst >= 4.0, "smallest shrink ratio over 20 instances x 2 spikes=" + fmt(worst) + " (>= 4)"};
}

struct BiasStudy {
  ExperimentReport report;
  double seconds = 0.0;
};

BiasStudy run_bias_study() {
  ExperimentConfig cfg;
  cfg.setting = 1;
  cfg.setting1.n = 100;
  cfg.setting1.p = 200;
  cfg.setting1.spikes = {150.0, 100.0, 50.0};
  cfg.replications = 50;
  cfg.draws = 500;
  cfg.seed = 404;
  cfg.spike_count = false;
  BiasStudy study;
  const auto start = Clock::now();
  study.report = run_experiment(cfg);
  study.seconds = seconds_since(start);
  return study;
}

// 4. Bias-correction efficacy
Outcome bias_correction(const BiasStudy& study) {
  const ExperimentReport& r = study.report;
  if (r.completed != r.config.replications) {
    return {false, std::to_string(r.failed.size()) + " replications failed"};
  }
  const MethodSummary* iw = r.find(Estimator::iw);
  const MethodSummary* pc = r.find(Estimator::iw_pc);
  const MethodSummary* phc = r.find(Estimator::iw_phc);
  const bool a = phc->err_mean[2] < iw->err_mean[2];
  bool b = true;
  for (double cp : phc->cp) b = b && cp >= 0.85 && cp <= 1.0;
  bool c = true;
  for (std::size_t i = 0; i < 3; ++i) {
    const double lo = std::min(pc->err_mean[i], phc->err_mean[i]);
    const double hi = std::max(pc->err_mean[i], phc->err_mean[i]);
    c = c && hi <= 1.3 * lo;
  }
  const bool fast = study.seconds < 900.0;
  std::ostringstream d;
  d << "(a) err3 phc=" << fmt(phc->err_mean[2]) << " iw=" << fmt(iw->err_mean[2]) << (a ? " ok" : " FAIL")
    << "; (b) phc cp=" << fmt(phc->cp[0]) << "," << fmt(phc->cp[1]) << "," << fmt(phc->cp[2])
    << (b ? " ok" : " FAIL") << "; (c) err pc=" << fmt(pc->err_mean[0]) << "," << fmt(pc->err_mean[1])
    << "," << fmt(pc->err_mean[2]) << " phc=" << fmt(phc->err_mean[0]) << "," << fmt(phc->err_mean[1])
    << "," << fmt(phc->err_mean[2]) << (c ? " ok" : " FAIL") << "; runtime=" << fmt(study.seconds)
    << "s (< 900)";
  return {a && b && c && fast, d.str()};
}

// 5. Calibration fixed point, re-evaluated with the independent oracle
Outcome calibration_fixed_point(const BiasStudy& study) {
  const ExperimentConfig& cfg = study.report.config;
  const int n = cfg.n();
  const int p = cfg.p();
  const int big_k = cfg.true_k();
  double worst = 0.0;
  int checked = 0;
  for (const ReplicationRecord& rec : study.report.records) {
    if (!rec.ok) return {false, "replication " + std::to_string(rec.index) + " failed: " + rec.error};
    RngStream stream(cfg.seed, static_cast<std::uint64_t>(rec.index));
    const SyntheticData data = gen_setting1(cfg.setting1, stream);
    const std::vector<double> s = to_std(sym_eigenvalues(sample_covariance(data.x)));
    std::vector<double> splus = s;
    for (double& v : splus) v += cfg.prior.a_scale / n;
    const double c = oracle::c_hat(s, n, p, big_k);
    for (int k = 1; k <= big_k; ++k) {
      const double g1 = oracle::gamma1(s, splus, n, p, big_k, rec.pc_nus[static_cast<std::size_t>(k - 1)], k);
      const double g2 = oracle::gamma2(s[static_cast<std::size_t>(k - 1)], c, n, p);
      worst = std::max(worst, std::abs(g1 - g2) / std::abs(g2));
      ++checked;
    }
  }
  return {worst <= 1e-6, "max relative residual over " + std::to_string(checked) + " roots=" + fmt(worst) +
                             " (<= 1e-6)"};
}

ExperimentConfig spike_config(int setting) {
  ExperimentConfig cfg;
  cfg.setting = setting;
  cfg.estimators = {Estimator::sample};
  cfg.replications = 50;
  cfg.seed = 606;
  if (setting == 1) {
    cfg.setting1.n = 500;
    cfg.setting1.p = 200;
  } else {
    cfg.setting2.n = 100;
    cfg.setting2.p = 200;
  }
  return cfg;
}

// 6. Spike-count accuracy
Outcome spike_accuracy() {
  const ExperimentReport s1 = run_experiment(spike_config(1));
  const ExperimentReport s2 = run_experiment(spike_config(2));
  const bool ok1 = s1.completed == 50 && s1.spike_acc >= 0.95 && s1.spike_avg >= 2.9 && s1.spike_avg <= 3.1;
  const bool ok2 = s2.completed == 50 && s2.spike_acc >= 0.8;
  std::ostringstream d;
  d << "setting1 n=500 p=200: ACC=" << fmt(s1.spike_acc) << " (>= 0.95) AVG=" << fmt(s1.spike_avg)
    << " (in [2.9, 3.1])" << (ok1 ? " ok" : " FAIL") << "; setting2 n=100 p=200: ACC=" << fmt(s2.spike_acc)
    << " (>= 0.8) AVG=" << fmt(s2.spike_avg) << (ok2 ? " ok" : " FAIL");
  return {ok1 && ok2, d.str()};
}

// 7. BIC direction on the criterion-6 setting-1 data
Outcome bic_direction() {
  const ExperimentConfig cfg = spike_config(1);
  const int n = cfg.n();
  const int p = cfg.p();
  int good = 0;
  for (int r = 0; r < cfg.replications; ++r) {
    RngStream stream(cfg.seed, static_cast<std::uint64_t>(r));
    const SyntheticData data = gen_setting1(cfg.setting1, stream);
    const std::vector<double> s = to_std(sym_eigenvalues(sample_covariance(data.x)));
    const double b3 = oracle::bic(s, n, p, 3);
    bool all = true;
    for (int k = 0; k <= 10; ++k) {
      if (k != 3 && !(oracle::bic(s, n, p, k) > b3)) all = false;
    }
    if (all) ++good;
  }
  const double share = static_cast<double>(good) / cfg.replications;
  return {share >= 0.95, "share of replications with BIC_K > BIC_3 for all K != 3 in 0..10=" + fmt(share) +
                             " (>= 0.95)"};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

int run(const std::string& command) { return std::system((command + " 2>/dev/null").c_str()); }

// 8. Byte-identical CLI output across thread counts
Outcome thread_determinism(const std::string& cli) {
  const fs::path dir = fs::temp_directory_path() / ("spikecov_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string q = "\"" + cli + "\"";
  const std::string d = dir.string();
  {
    std::ofstream cfg(dir / "sim.cfg");
    cfg << "setting = 1\nn = 60\np = 40\nreplications = 6\ndraws = 100\neigenvectors = true\n";
  }
  bool ok = run(q + " --seed 5 generate --n 72 --p 16 -o " + d + "/returns.csv") == 0;
  std::vector<std::string> names;
  for (int t : {1, 4, 8}) {
    const std::string ts = std::to_string(t);
    for (const char* fmt_name : {"json", "csv"}) {
      const std::string sim = d + "/sim_" + ts + "." + fmt_name;
      const std::string ar = d + "/ar_" + ts + "." + fmt_name;
      ok = ok && run(q + " --seed 9 --threads " + ts + " --out " + fmt_name + " simulate " + d + "/sim.cfg -o " + sim) == 0;
      ok = ok && run(q + " --seed 9 --draws 80 --threads " + ts + " --out " + fmt_name + " absorption " + d +
                     "/returns.csv --input-mode returns --window 24 --step 6 -o " + ar) == 0;
    }
  }
  int compared = 0;
  for (const char* stem : {"sim_", "ar_"}) {
    for (const char* ext : {".json", ".csv"}) {
      const std::string base = slurp(dir / (std::string(stem) + "1" + ext));
      ok = ok && !base.empty();
      for (const char* t : {"4", "8"}) {
        ok = ok && slurp(dir / (std::string(stem) + t + ext)) == base;
        ++compared;
      }
    }
  }
  fs::remove_all(dir);
  return {ok, "simulate and absorption, JSON and CSV, threads 1 vs 4 vs 8: " + std::to_string(compared) +
                  " comparisons" + (ok ? " identical" : " differ or a run failed")};
}

// 9. Trivial identities
Outcome trivial_identities() {
  std::vector<std::string> failed;
  RngStream st(909, 0);
  Vector eigs(12);
  for (int i = 0; i < eigs.size(); ++i) eigs(i) = 12.0 - i + st.uniform();
  if (std::abs(absorption_ratio(eigs, 12) - 1.0) > 1e-15) failed.push_back("AR(p)=1");
  for (int k = 1; k < 12; ++k) {
    if (!(absorption_ratio(eigs, k + 1) > absorption_ratio(eigs, k))) failed.push_back("AR monotone");
  }
  if (entropy(std::vector<double>{0.0, 1.0, 0.0}) != 0.0) failed.push_back("entropy point mass");
  for (int trial = 0; trial < 20; ++trial) {
    Vector a(8);
    Vector b(8);
    for (int i = 0; i < 8; ++i) {
      a(i) = st.normal();
      b(i) = st.normal();
    }
    a.normalize();
    b.normalize();
    const double e = eigenvector_error(a, b);
    if (std::abs(eigenvector_error(-a, b) - e) > 1e-15 || std::abs(eigenvector_error(a, -b) - e) > 1e-15) {
      failed.push_back("eigenvector_error sign invariance");
      break;
    }
  }
  if (eigenvector_error(eigs.normalized(), -eigs.normalized()) > 1e-15) failed.push_back("error of -v vs v");
  std::string detail = "AR(p)=1, AR monotone in K, entropy(point mass)=0, eigenvector_error sign invariance";
  if (!failed.empty()) detail += "; failed: " + failed.front();
  return {failed.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <spikecov CLI> [--expect-fail N]...\n";
    return 2;
  }
  const std::string cli = argv[1];
  std::set<int> expected;
  for (int i = 2; i < argc; ++i) {
    if (std::string(argv[i]) == "--expect-fail" && i + 1 < argc) {
      expected.insert(std::stoi(argv[++i]));
    } else {
      std::cerr << "unknown argument: " << argv[i] << "\n";
      return 2;
    }
  }
  std::set<int> failed;
  const auto report = [&](int id, const std::function<Outcome()>& body) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.passed) failed.insert(id);
    std::cout << "criterion " << id << ": " << (o.passed ? "PASS" : "FAIL") << "  " << o.detail << "  ["
              << fmt(seconds_since(start)) << "s]" << std::endl;
  };

  report(1, sampler_moment);
  report(2, offblock_expectation);
  report(3, cubic_scaling);
  BiasStudy study;
  report(4, [&] {
    study = run_bias_study();
    return bias_correction(study);
  });
  report(5, [&] { return calibration_fixed_point(study); });
  report(6, spike_accuracy);
  report(7, bic_direction);
  report(8, [&] { return thread_determinism(cli); });
  report(9, trivial_identities);

  const auto list = [](const std::set<int>& ids) {
    std::string out;
    for (int id : ids) out += (out.empty() ? "" : ",") + std::to_string(id);
    return out.empty() ? std::string("none") : out;
  };
  std::cout << (9 - failed.size()) << "/9 criteria PASS; failing: " << list(failed)
            << "; expected failing: " << list(expected) << std::endl;
  return failed == expected ? 0 : 1;
}
