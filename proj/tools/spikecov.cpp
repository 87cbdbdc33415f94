#include "spikecov/absorption.hpp"
#include "spikecov/analysis.hpp"
#include "spikecov/errors.hpp"
#include "spikecov/experiment.hpp"
#include "spikecov/report_io.hpp"
#include "spikecov/sampling.hpp"
#include "spikecov/series.hpp"
#include "spikecov/simgen.hpp"
#include "spikecov/validation.hpp"

#include "CLI11.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

using namespace spikecov;

namespace {

enum Exit { kOk = 0, kUsage = 2, kData = 3, kNumerical = 4 };

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  std::optional<int> draws;
  std::optional<std::string> method;
  std::optional<double> level;
  std::string out = "json";
  std::string output;
  unsigned threads = 1;
};

struct PriorOptions {
  std::optional<double> a;
  std::optional<double> nu;
  std::string spike_prior = "uniform";
  double alpha = 1.0;
  int k_min = 1;
  std::optional<int> k_max;
};

void add_prior_options(CLI::App* app, PriorOptions& po) {
  app->add_option("--prior-a", po.a, "Prior scale A = a I (default 0.1)")->check(CLI::PositiveNumber);
  app->add_option("--prior-nu", po.nu, "Prior degrees of freedom (default 2p + 2)");
  app->add_option("--spike-prior", po.spike_prior, "Prior on K: uniform or exponential")
      ->check(CLI::IsMember({"uniform", "exponential"}));
  app->add_option("--alpha", po.alpha, "Rate of the exponential prior on K")->check(CLI::PositiveNumber);
  app->add_option("--k-min", po.k_min, "Smallest K in the spike posterior support (0 admits no spikes)")
      ->check(CLI::Range(0, 1000000));
  app->add_option("--k-max", po.k_max, "Largest K in the spike posterior support")
      ->check(CLI::PositiveNumber);
}

void apply_prior(const PriorOptions& po, PriorSettings& prior, SpikePrior& spike) {
  if (po.a) prior.a_scale = *po.a;
  if (po.nu) prior.nu = *po.nu;
  spike.kind = po.spike_prior == "exponential" ? SpikePrior::Kind::exponential
                                                : SpikePrior::Kind::uniform;
  spike.alpha = po.alpha;
  spike.k_min = po.k_min;
  spike.k_max = po.k_max.value_or(0);
}

SamplingMode parse_mode(const std::string& s) {
  return s == "fast-topk" ? SamplingMode::fast_topk : SamplingMode::full;
}

InputMode parse_input(const std::string& s) {
  return s == "prices" ? InputMode::prices : InputMode::returns;
}

template <class Report>
void emit(const GlobalOptions& g, const Report& report) {
  std::ostringstream buf;
  if (g.out == "csv") {
    write_csv(buf, report);
  } else {
    buf << dump_json(to_json(report));
  }
  if (g.output.empty() || g.output == "-") {
    std::cout << buf.str();
    return;
  }
  std::ofstream f(g.output, std::ios::binary);
  if (!f) throw DataError("cannot write '" + g.output + "'");
  f << buf.str();
}

std::string month_date(int i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-01", 2000 + i / 12, i % 12 + 1);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian inference for spiked covariance models"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--draws", g.draws, "Posterior draws per fit")->check(CLI::PositiveNumber);
  app.add_option("--method", g.method, "iw, iw-pc or iw-phc")
      ->check(CLI::IsMember({"iw", "iw-pc", "iw-phc"}));
  app.add_option("--level", g.level, "Credible level")->check(CLI::Range(0.0, 1.0));
  app.add_option("--out", g.out, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("-o,--output", g.output, "Output file (default stdout)");
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run a replication study from a config file");
  std::string sim_config;
  std::optional<int> sim_reps;
  sim->add_option("config", sim_config, "key = value experiment file")->required()->check(CLI::ExistingFile);
  sim->add_option("--replications", sim_reps, "Override the replication count");

  // analyze
  auto* ana = app.add_subcommand("analyze", "Eigen and spike-count report for one dataset");
  std::string ana_input;
  std::string ana_mode = "returns";
  std::string ana_sampling = "full";
  std::optional<int> ana_k;
  bool ana_center = false;
  bool ana_vectors = false;
  PriorOptions ana_prior;
  ana->add_option("input", ana_input, "CSV with a date column and one column per variable")
      ->required()
      ->check(CLI::ExistingFile);
  ana->add_option("--input-mode", ana_mode, "returns or prices")->check(CLI::IsMember({"returns", "prices"}));
  ana->add_option("--k", ana_k, "Fix the number of spikes (default: MAP)")->check(CLI::PositiveNumber);
  ana->add_flag("--center", ana_center, "Subtract column means");
  ana->add_flag("--eigenvectors", ana_vectors, "Report mean eigenvectors");
  ana->add_option("--sampling", ana_sampling, "full or fast-topk")
      ->check(CLI::IsMember({"full", "fast-topk"}));
  add_prior_options(ana, ana_prior);

  // absorption
  auto* abs = app.add_subcommand("absorption", "Rolling-window absorption ratio");
  std::string abs_input;
  std::string abs_mode = "prices";
  int abs_window = 12;
  int abs_step = 1;
  bool abs_center = false;
  bool abs_absolute_prior = false;
  PriorOptions abs_prior;
  abs->add_option("input", abs_input, "CSV of prices or returns")->required()->check(CLI::ExistingFile);
  abs->add_option("--input-mode", abs_mode, "prices or returns")->check(CLI::IsMember({"returns", "prices"}));
  abs->add_option("--window", abs_window, "Window length in periods");
  abs->add_option("--step", abs_step, "Window step in periods");
  abs->add_flag("--center", abs_center, "Subtract window column means");
  abs->add_flag("--absolute-prior", abs_absolute_prior,
                "Use --prior-a as is instead of scaling it by each window's average variance");
  add_prior_options(abs, abs_prior);

  // validate
  auto* val = app.add_subcommand("validate", "Sampler-moment and perturbation-oracle checks");
  int val_instances = 20;
  val->add_option("--instances", val_instances, "Random perturbation instances")->check(CLI::PositiveNumber);

  // generate
  auto* gen = app.add_subcommand("generate", "Write one synthetic dataset as CSV");
  int gen_setting = 1;
  int gen_n = 100;
  int gen_p = 200;
  gen->add_option("--setting", gen_setting, "1 (diagonal spikes) or 2 (factor model)")
      ->check(CLI::IsMember({1, 2}));
  gen->add_option("--n", gen_n, "Observations")->check(CLI::PositiveNumber);
  gen->add_option("--p", gen_p, "Dimension")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kUsage;
  }

  try {
    const std::uint64_t seed = g.seed.value_or(1);
    if (sim->parsed()) {
      ExperimentConfig cfg = load_experiment_config(sim_config);
      if (g.seed) cfg.seed = *g.seed;
      if (g.draws) cfg.draws = *g.draws;
      if (g.level) cfg.level = *g.level;
      if (sim_reps) cfg.replications = *sim_reps;
      if (g.method) cfg.estimators = {Estimator::sample, parse_estimator(*g.method)};
      emit(g, run_experiment(cfg, g.threads));
    } else if (ana->parsed()) {
      LoadedReturns data = load_returns(ana_input, parse_input(ana_mode), ana_center);
      AnalysisConfig cfg;
      if (g.method) cfg.method = parse_method(*g.method);
      cfg.k = ana_k;
      cfg.draws = g.draws.value_or(500);
      cfg.level = g.level.value_or(0.95);
      cfg.seed = seed;
      cfg.mode = parse_mode(ana_sampling);
      cfg.eigenvectors = ana_vectors;
      cfg.threads = g.threads;
      apply_prior(ana_prior, cfg.prior, cfg.spike_prior);
      AnalysisReport report = analyze(data.x, cfg);
      report.dropped = data.dropped;
      report.tickers = data.series.tickers;
      emit(g, report);
    } else if (abs->parsed()) {
      if (g.method && *g.method != "iw-phc") {
        throw InvalidConfiguration("absorption runs the iw-phc pipeline only");
      }
      RollingConfig cfg;
      cfg.window = abs_window;
      cfg.step = abs_step;
      cfg.draws = g.draws.value_or(500);
      cfg.level = g.level.value_or(0.95);
      cfg.seed = seed;
      cfg.center = abs_center;
      cfg.relative_prior = !abs_absolute_prior;
      cfg.threads = g.threads;
      apply_prior(abs_prior, cfg.prior, cfg.spike_prior);
      const PriceSeries series = read_series_csv(abs_input);
      emit(g, parse_input(abs_mode) == InputMode::prices ? rolling_analysis(series, cfg)
                                                          : rolling_analysis_returns(series, cfg));
    } else if (val->parsed()) {
      ValidationConfig cfg;
      cfg.seed = seed;
      cfg.draws = g.draws.value_or(cfg.draws);
      cfg.instances = val_instances;
      cfg.threads = g.threads;
      const ValidationReport report = run_validation(cfg);
      emit(g, report);
      for (const ValidationCheck& c : report.checks) {
        std::cerr << (c.passed ? "PASS " : "FAIL ") << c.name << " value=" << c.value
                  << " threshold=" << c.threshold << '\n';
      }
      return report.all_passed() ? kOk : kNumerical;
    } else if (gen->parsed()) {
      RngStream stream(seed, 0);
      SyntheticData data = [&] {
        if (gen_setting == 1) {
          Setting1Config c;
          c.n = gen_n;
          c.p = gen_p;
          return gen_setting1(c, stream);
        }
        Setting2Config c;
        c.n = gen_n;
        c.p = gen_p;
        return gen_setting2(c, stream);
      }();
      std::ostringstream buf;
      buf << "date";
      for (int j = 0; j < gen_p; ++j) buf << ",x" << j + 1;
      buf << '\n';
      const Matrix& x = data.x.data();
      for (Index i = 0; i < x.rows(); ++i) {
        buf << month_date(static_cast<int>(i));
        for (Index j = 0; j < x.cols(); ++j) buf << ',' << format_number(x(i, j));
        buf << '\n';
      }
      if (g.output.empty() || g.output == "-") {
        std::cout << buf.str();
      } else {
        std::ofstream f(g.output, std::ios::binary);
        if (!f) throw DataError("cannot write '" + g.output + "'");
        f << buf.str();
      }
    }
  } catch (const InvalidConfiguration& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kOk;
}
