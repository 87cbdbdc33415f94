#include "spikecov/experiment.hpp"

#include "spikecov/eigen_inference.hpp"
#include "spikecov/errors.hpp"
#include "spikecov/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace spikecov {

namespace {

constexpr std::uint64_t kIwSalt = 1;
constexpr std::uint64_t kPcSalt = 2;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw InvalidConfiguration("config key '" + key + "': not a number: '" + v + "'");
  }
}

int to_int(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (d != std::floor(d)) throw InvalidConfiguration("config key '" + key + "': not an integer");
  return static_cast<int>(d);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw InvalidConfiguration("config key '" + key + "': not a boolean: '" + v + "'");
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& item : split_list(v)) out.push_back(to_double(key, item));
  return out;
}

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

MethodOutcome summarize_method(Estimator e, const PosteriorSamples& samples,
                               const SyntheticData& data, const ExperimentConfig& cfg) {
  MethodOutcome out;
  out.estimator = e;
  const auto summaries = summarize_eigenvalues(samples, cfg.level);
  for (const auto& s : summaries) {
    const double truth = data.true_values(s.k - 1);
    out.estimate.push_back(s.mean);
    out.rel_error.push_back(relative_error(s.mean, truth));
    out.ci_low.push_back(s.ci_low);
    out.ci_high.push_back(s.ci_high);
    out.covered.push_back(s.ci_low <= truth && truth <= s.ci_high ? 1 : 0);
  }
  if (cfg.eigenvectors && samples.has_eigenvectors() && !samples.fixed_eigenvectors) {
    for (int k = 1; k <= samples.k; ++k) {
      const VectorSummary v = mean_eigenvector(samples, k);
      out.vector_error.push_back(eigenvector_error(v.mean_vector, data.true_vectors.col(k - 1)));
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(Estimator e) {
  switch (e) {
    case Estimator::sample: return "sample";
    case Estimator::iw: return "iw";
    case Estimator::iw_pc: return "iw-pc";
    case Estimator::iw_phc: return "iw-phc";
  }
  return "?";
}

Estimator parse_estimator(std::string_view name) {
  if (name == "sample") return Estimator::sample;
  if (name == "iw") return Estimator::iw;
  if (name == "iw-pc") return Estimator::iw_pc;
  if (name == "iw-phc") return Estimator::iw_phc;
  throw InvalidConfiguration("unknown method '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  if (setting != 1 && setting != 2) throw InvalidConfiguration("setting must be 1 or 2");
  if (replications < 2) throw InvalidConfiguration("replications must be >= 2");
  if (draws < 2) throw InvalidConfiguration("draws must be >= 2");
  if (!(level > 0.0 && level < 1.0)) throw InvalidConfiguration("level must be in (0,1)");
  if (true_k() < 1) throw InvalidConfiguration("experiment needs at least one spike");
  if (true_k() >= std::min(n(), p())) throw InvalidConfiguration("K must be < min(n,p)");
  if (estimators.empty()) throw InvalidConfiguration("no methods selected");
  for (std::size_t i = 0; i < estimators.size(); ++i) {
    for (std::size_t j = i + 1; j < estimators.size(); ++j) {
      if (estimators[i] == estimators[j]) throw InvalidConfiguration("duplicate method in list");
    }
  }
}

ExperimentConfig parse_experiment_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidConfiguration("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "setting") cfg.setting = to_int(key, value);
    else if (key == "n") cfg.setting1.n = cfg.setting2.n = to_int(key, value);
    else if (key == "p") cfg.setting1.p = cfg.setting2.p = to_int(key, value);
    else if (key == "spikes") cfg.setting1.spikes = to_doubles(key, value);
    else if (key == "bulk") cfg.setting1.bulk = to_double(key, value);
    else if (key == "spike_norms") cfg.setting2.spike_norms = to_doubles(key, value);
    else if (key == "gamma_a") cfg.setting2.gamma_a = to_double(key, value);
    else if (key == "gamma_b") cfg.setting2.gamma_b = to_double(key, value);
    else if (key == "replications") cfg.replications = to_int(key, value);
    else if (key == "draws") cfg.draws = to_int(key, value);
    else if (key == "level") cfg.level = to_double(key, value);
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(std::stoull(value));
    else if (key == "methods") {
      cfg.estimators.clear();
      for (const auto& m : split_list(value)) cfg.estimators.push_back(parse_estimator(m));
    } else if (key == "prior_a") cfg.prior.a_scale = to_double(key, value);
    else if (key == "prior_nu") cfg.prior.nu = to_double(key, value);
    else if (key == "spike_count") cfg.spike_count = to_bool(key, value);
    else if (key == "k_min") cfg.spike_prior.k_min = to_int(key, value);
    else if (key == "k_max") cfg.spike_prior.k_max = to_int(key, value);
    else if (key == "spike_prior") {
      if (value == "uniform") cfg.spike_prior.kind = SpikePrior::Kind::uniform;
      else if (value == "exponential") cfg.spike_prior.kind = SpikePrior::Kind::exponential;
      else throw InvalidConfiguration("spike_prior must be uniform or exponential");
    } else if (key == "alpha") cfg.spike_prior.alpha = to_double(key, value);
    else if (key == "eigenvectors") cfg.eigenvectors = to_bool(key, value);
    else if (key == "mode") {
      if (value == "full") cfg.mode = SamplingMode::full;
      else if (value == "fast-topk") cfg.mode = SamplingMode::fast_topk;
      else throw InvalidConfiguration("mode must be full or fast-topk");
    } else {
      throw InvalidConfiguration("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file '" + path + "'");
  return parse_experiment_config(in);
}

const MethodSummary* ExperimentReport::find(Estimator e) const {
  for (const auto& m : methods) {
    if (m.estimator == e) return &m;
  }
  return nullptr;
}

ReplicationRecord run_replication(const ExperimentConfig& cfg, int index) {
  ReplicationRecord rec;
  rec.index = index;
  RngStream stream(cfg.seed, static_cast<std::uint64_t>(index));
  const SyntheticData data =
      cfg.setting == 1 ? gen_setting1(cfg.setting1, stream) : gen_setting2(cfg.setting2, stream);
  const int n = cfg.n();
  const int p = cfg.p();
  const int k = cfg.true_k();
  const SymMatrix s = sample_covariance(data.x);
  const SymMatrix a = SymMatrix::scaled_identity(p, cfg.prior.a_scale);
  const CorrectionContext ctx = make_correction_context(s, a, n, k);
  rec.c_hat = ctx.c_hat;
  for (int i = 0; i < k; ++i) {
    rec.truth.push_back(data.true_values(i));
    rec.sample_eigs.push_back(ctx.s_eigs(i));
  }

  const auto wants = [&](Estimator e) {
    return std::find(cfg.estimators.begin(), cfg.estimators.end(), e) != cfg.estimators.end();
  };
  DrawOptions draw_opts;
  draw_opts.eigenvectors = cfg.eigenvectors;

  for (Estimator e : cfg.estimators) {
    if (e != Estimator::sample) continue;
    MethodOutcome out;
    out.estimator = e;
    EigenDecomposition eig;
    if (cfg.eigenvectors) eig = sym_eigen(s);
    for (int i = 0; i < k; ++i) {
      out.estimate.push_back(ctx.s_eigs(i));
      out.rel_error.push_back(relative_error(ctx.s_eigs(i), data.true_values(i)));
      if (cfg.eigenvectors) {
        out.vector_error.push_back(eigenvector_error(eig.vectors.col(i), data.true_vectors.col(i)));
      }
    }
    rec.methods.push_back(std::move(out));
  }

  if (wants(Estimator::iw) || wants(Estimator::iw_phc)) {
    const double nu = cfg.prior.nu_for(p);
    const PosteriorSpec spec = build_posterior(s, n, a, nu);
    const PosteriorSamples raw =
        posterior_eigen_draws(spec, k, cfg.draws, stream.derive_seed(kIwSalt), cfg.mode, draw_opts);
    if (wants(Estimator::iw)) rec.methods.push_back(summarize_method(Estimator::iw, raw, data, cfg));
    if (wants(Estimator::iw_phc)) {
      const Vector factors = posthoc_factors(ctx, nu);
      rec.phc_factors.assign(factors.data(), factors.data() + factors.size());
      rec.methods.push_back(
          summarize_method(Estimator::iw_phc, scale_draws(raw, factors), data, cfg));
    }
  }

  if (wants(Estimator::iw_pc)) {
    PipelineConfig pc;
    pc.method = Method::iw_pc;
    pc.k = k;
    pc.draws = cfg.draws;
    pc.seed = stream.derive_seed(kPcSalt);
    pc.prior = cfg.prior;
    pc.mode = cfg.mode;
    pc.draw = draw_opts;
    const PipelineResult result = run_pipeline(s, n, pc);
    for (int i = 1; i <= k; ++i) {
      const double nu_k = result.nus(i - 1);
      const double g1 = gamma1_tilde(result.context, nu_k, i);
      const double g2 = gamma2(result.context.s_eigs(i - 1), result.context.c_hat, n, p);
      rec.pc_nus.push_back(nu_k);
      rec.pc_fixed_point_residual.push_back(std::abs(g1 - g2) / std::abs(g2));
    }
    rec.methods.push_back(summarize_method(Estimator::iw_pc, result.samples, data, cfg));
  }

  // Keep method order as configured.
  std::stable_sort(rec.methods.begin(), rec.methods.end(), [&](const auto& l, const auto& r) {
    const auto pos = [&](Estimator e) {
      return std::find(cfg.estimators.begin(), cfg.estimators.end(), e) - cfg.estimators.begin();
    };
    return pos(l.estimator) < pos(r.estimator);
  });

  if (cfg.spike_count) {
    SpikePrior prior = cfg.spike_prior;
    if (prior.k_max <= 0) prior.k_max = default_k_max(n, p, numerical_rank(ctx.s_eigs));
    const SpikePosterior post = spike_posterior(ctx.s_eigs, n, p, prior);
    rec.map_k = post.map_k;
    rec.spike_entropy = post.entropy;
  }
  return rec;
}

ExperimentReport run_experiment(const ExperimentConfig& config, unsigned threads) {
  config.validate();
  ExperimentReport report;
  report.config = config;
  report.records.resize(static_cast<std::size_t>(config.replications));
  parallel_for(report.records.size(), threads, [&](std::size_t r) {
    try {
      report.records[r] = run_replication(config, static_cast<int>(r));
    } catch (const std::exception& e) {
      ReplicationRecord failed;
      failed.index = static_cast<int>(r);
      failed.ok = false;
      failed.error = e.what();
      report.records[r] = std::move(failed);
    }
  });

  const int k = config.true_k();
  std::vector<const ReplicationRecord*> ok;
  for (const auto& rec : report.records) {
    if (rec.ok) ok.push_back(&rec);
    else report.failed.push_back(rec.index);
  }
  report.completed = static_cast<int>(ok.size());

  for (std::size_t m = 0; m < config.estimators.size(); ++m) {
    MethodSummary summary;
    summary.estimator = config.estimators[m];
    const bool has_ci = summary.estimator != Estimator::sample;
    for (int i = 0; i < k; ++i) {
      std::vector<double> errs, xis;
      double covered = 0.0;
      for (const auto* rec : ok) {
        const MethodOutcome& out = rec->methods[m];
        errs.push_back(out.rel_error[static_cast<std::size_t>(i)]);
        if (has_ci) covered += out.covered[static_cast<std::size_t>(i)];
        if (!out.vector_error.empty()) xis.push_back(out.vector_error[static_cast<std::size_t>(i)]);
      }
      summary.err_mean.push_back(errs.empty() ? nan() : mean_of(errs));
      summary.cp.push_back(has_ci && !ok.empty() ? covered / static_cast<double>(ok.size()) : nan());
      if (!xis.empty()) summary.err_xi_mean.push_back(mean_of(xis));
    }
    report.methods.push_back(std::move(summary));
  }

  report.spike_avg = nan();
  report.spike_acc = nan();
  if (config.spike_count && !ok.empty()) {
    double sum = 0.0;
    double hits = 0.0;
    for (const auto* rec : ok) {
      sum += rec->map_k;
      if (rec->map_k == k) hits += 1.0;
    }
    report.spike_avg = sum / static_cast<double>(ok.size());
    report.spike_acc = hits / static_cast<double>(ok.size());
  }
  if (config.setting == 2) {
    report.notes.emplace_back("idiosyncratic variances redrawn for every replication");
  }
  return report;
}

}  // namespace spikecov
