#include "spikecov/report_io.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <type_traits>

namespace spikecov {

namespace {

Json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

template <class T>
Json numbers(const std::vector<T>& values) {
  Json arr = Json::array();
  for (const T& v : values) {
    if constexpr (std::is_floating_point_v<T>) {
      arr.push_back(number(v));
    } else {
      arr.push_back(v);
    }
  }
  return arr;
}

Json prior_json(const PriorSettings& prior, int p) {
  Json j;
  j["a_scale"] = prior.a_scale;
  j["nu"] = prior.nu_for(p);
  return j;
}

Json spike_prior_json(const SpikePrior& prior) {
  Json j;
  j["kind"] = prior.kind == SpikePrior::Kind::uniform ? "uniform" : "exponential";
  if (prior.kind == SpikePrior::Kind::exponential) j["alpha"] = prior.alpha;
  j["k_min"] = prior.k_min;
  j["k_max"] = prior.k_max > 0 ? Json(prior.k_max) : Json("auto");
  return j;
}

Json spike_json(const SpikePosterior& post) {
  Json j;
  j["support"] = numbers(post.support);
  j["probs"] = numbers(post.probs);
  j["bic"] = numbers(post.bic);
  j["map_k"] = post.map_k;
  j["entropy"] = number(post.entropy);
  j["truncated"] = post.truncated;
  return j;
}

const char* mode_name(SamplingMode m) { return m == SamplingMode::full ? "full" : "fast-topk"; }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string at_or_empty(const std::vector<double>& v, std::size_t i) {
  return i < v.size() ? format_number(v[i]) : std::string();
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return {};
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

Json to_json(const ExperimentReport& report) {
  const ExperimentConfig& cfg = report.config;
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "experiment";

  Json c;
  c["setting"] = cfg.setting;
  c["n"] = cfg.n();
  c["p"] = cfg.p();
  if (cfg.setting == 1) {
    c["spikes"] = numbers(cfg.setting1.spikes);
    c["bulk"] = cfg.setting1.bulk;
  } else {
    c["spike_norms"] = numbers(cfg.setting2.spike_norms);
    c["gamma_a"] = cfg.setting2.gamma_a;
    c["gamma_b"] = cfg.setting2.gamma_b;
  }
  c["replications"] = cfg.replications;
  c["draws"] = cfg.draws;
  c["level"] = cfg.level;
  c["seed"] = cfg.seed;
  Json est = Json::array();
  for (Estimator e : cfg.estimators) est.push_back(std::string(to_string(e)));
  c["methods"] = est;
  c["prior"] = prior_json(cfg.prior, cfg.p());
  c["spike_count"] = cfg.spike_count;
  if (cfg.spike_count) c["spike_prior"] = spike_prior_json(cfg.spike_prior);
  c["eigenvectors"] = cfg.eigenvectors;
  c["mode"] = mode_name(cfg.mode);
  j["config"] = c;

  j["completed"] = report.completed;
  j["failed"] = numbers(report.failed);
  Json summary = Json::array();
  for (const MethodSummary& m : report.methods) {
    Json s;
    s["method"] = std::string(to_string(m.estimator));
    s["err_mean"] = numbers(m.err_mean);
    s["cp"] = numbers(m.cp);
    if (!m.err_xi_mean.empty()) s["err_xi_mean"] = numbers(m.err_xi_mean);
    summary.push_back(s);
  }
  j["summary"] = summary;
  if (cfg.spike_count) {
    j["spike_count"] = {{"avg", number(report.spike_avg)}, {"acc", number(report.spike_acc)}};
  }

  Json recs = Json::array();
  for (const ReplicationRecord& r : report.records) {
    Json rj;
    rj["index"] = r.index;
    rj["ok"] = r.ok;
    if (!r.ok) {
      rj["error"] = r.error;
      recs.push_back(rj);
      continue;
    }
    rj["truth"] = numbers(r.truth);
    rj["sample_eigenvalues"] = numbers(r.sample_eigs);
    rj["c_hat"] = number(r.c_hat);
    Json ms = Json::array();
    for (const MethodOutcome& m : r.methods) {
      Json mj;
      mj["method"] = std::string(to_string(m.estimator));
      mj["estimate"] = numbers(m.estimate);
      mj["rel_error"] = numbers(m.rel_error);
      if (!m.ci_low.empty()) {
        mj["ci_low"] = numbers(m.ci_low);
        mj["ci_high"] = numbers(m.ci_high);
        mj["covered"] = numbers(m.covered);
      }
      if (!m.vector_error.empty()) mj["vector_error"] = numbers(m.vector_error);
      ms.push_back(mj);
    }
    rj["methods"] = ms;
    if (!r.pc_nus.empty()) {
      rj["pc_nu"] = numbers(r.pc_nus);
      rj["pc_fixed_point_residual"] = numbers(r.pc_fixed_point_residual);
    }
    if (!r.phc_factors.empty()) rj["phc_factors"] = numbers(r.phc_factors);
    if (cfg.spike_count) {
      rj["map_k"] = r.map_k;
      rj["spike_entropy"] = number(r.spike_entropy);
    }
    recs.push_back(rj);
  }
  j["replications"] = recs;
  j["notes"] = report.notes;
  return j;
}

Json to_json(const AnalysisReport& report) {
  const AnalysisConfig& cfg = report.config;
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "analysis";
  Json c;
  c["method"] = std::string(to_string(cfg.method));
  c["k"] = cfg.k ? Json(*cfg.k) : Json("map");
  c["draws"] = cfg.draws;
  c["level"] = cfg.level;
  c["seed"] = cfg.seed;
  c["prior"] = prior_json(cfg.prior, report.p);
  c["spike_prior"] = spike_prior_json(cfg.spike_prior);
  c["mode"] = mode_name(cfg.mode);
  c["eigenvectors"] = cfg.eigenvectors;
  j["config"] = c;

  Json d;
  d["n"] = report.n;
  d["p"] = report.p;
  d["dropped_rows"] = report.dropped;
  d["tickers"] = report.tickers;
  j["data"] = d;
  j["sample_eigenvalues"] = numbers(report.sample_eigenvalues);
  if (report.spike) {
    j["spike_posterior"] = spike_json(*report.spike);
  } else {
    j["spike_posterior"] = nullptr;
    j["spike_posterior_error"] = report.spike_error;
  }
  j["k_used"] = report.k_used;
  j["c_hat"] = number(report.c_hat);
  j["nu"] = numbers(report.nus);
  j["factors"] = numbers(report.factors);
  Json eig = Json::array();
  for (const EigenSummary& e : report.eigenvalues) {
    Json ej;
    ej["k"] = e.k;
    ej["mean"] = number(e.mean);
    ej["ci_low"] = number(e.ci_low);
    ej["ci_high"] = number(e.ci_high);
    ej["n_draws"] = e.n_draws;
    ej["mean_outside_ci"] = e.mean_outside_ci;
    eig.push_back(ej);
  }
  j["eigenvalues"] = eig;
  if (!report.eigenvectors.empty()) {
    Json vec = Json::array();
    for (const VectorSummary& v : report.eigenvectors) {
      Json vj;
      vj["k"] = v.k;
      vj["mean_vector"] = numbers(std::vector<double>(v.mean_vector.data(),
                                                      v.mean_vector.data() + v.mean_vector.size()));
      vj["dispersion"] = number(v.dispersion);
      vec.push_back(vj);
    }
    j["eigenvectors"] = vec;
  }
  j["flags"] = {{"reordered", report.reordered}, {"extrapolated", report.extrapolated}};
  return j;
}

Json to_json(const RollingReport& report) {
  const RollingConfig& cfg = report.config;
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "absorption";
  Json c;
  c["window"] = cfg.window;
  c["step"] = cfg.step;
  c["draws"] = cfg.draws;
  c["level"] = cfg.level;
  c["seed"] = cfg.seed;
  c["prior"] = prior_json(cfg.prior, static_cast<int>(report.tickers.size()));
  c["spike_prior"] = spike_prior_json(cfg.spike_prior);
  c["center"] = cfg.center;
  c["relative_prior"] = cfg.relative_prior;
  j["config"] = c;
  j["tickers"] = report.tickers;
  Json ws = Json::array();
  for (const WindowResult& w : report.windows) {
    Json wj;
    wj["window"] = w.index;
    wj["start_date"] = w.start_date;
    wj["end_date"] = w.end_date;
    wj["n_used"] = w.n_used;
    wj["dropped_rows"] = w.dropped;
    wj["map_k"] = w.map_k;
    wj["entropy"] = number(w.entropy);
    wj["spike_support"] = numbers(w.support);
    wj["spike_probs"] = numbers(w.spike_probs);
    wj["ar_k"] = w.ar_k;
    wj["prior_a"] = number(w.prior_a);
    wj["ar"] = {{"mean", number(w.ar_mean)}, {"low", number(w.ar_low)}, {"high", number(w.ar_high)}};
    wj["ar_iw"] = {
        {"mean", number(w.ar_iw_mean)}, {"low", number(w.ar_iw_low)}, {"high", number(w.ar_iw_high)}};
    wj["degraded"] = w.degraded;
    if (!w.note.empty()) wj["note"] = w.note;
    ws.push_back(wj);
  }
  j["windows"] = ws;
  return j;
}

void write_csv(std::ostream& out, const ExperimentReport& report) {
  out << "schema_version,scope,replication,method,k,truth,estimate,rel_error,ci_low,ci_high,"
         "covered,vector_error,map_k\n";
  for (const ReplicationRecord& r : report.records) {
    if (!r.ok) {
      out << kSchemaVersion << ",failed," << r.index << ",,,,,,,,,,\n";
      continue;
    }
    for (const MethodOutcome& m : r.methods) {
      for (std::size_t i = 0; i < m.estimate.size(); ++i) {
        out << kSchemaVersion << ",replication," << r.index << ',' << to_string(m.estimator) << ','
            << i + 1 << ',' << at_or_empty(r.truth, i) << ',' << format_number(m.estimate[i]) << ','
            << at_or_empty(m.rel_error, i) << ',' << at_or_empty(m.ci_low, i) << ','
            << at_or_empty(m.ci_high, i) << ',';
        if (i < m.covered.size()) out << m.covered[i];
        out << ',' << at_or_empty(m.vector_error, i) << ',';
        if (report.config.spike_count) out << r.map_k;
        out << '\n';
      }
    }
  }
  // Summary rows: rel_error is the mean error, covered the coverage rate and
  // vector_error the mean eigenvector error.
  for (const MethodSummary& m : report.methods) {
    for (std::size_t i = 0; i < m.err_mean.size(); ++i) {
      out << kSchemaVersion << ",summary,," << to_string(m.estimator) << ',' << i + 1 << ",,,"
          << format_number(m.err_mean[i]) << ",,," << at_or_empty(m.cp, i) << ','
          << at_or_empty(m.err_xi_mean, i) << ",\n";
    }
  }
  if (report.config.spike_count) {
    out << kSchemaVersion << ",spike_avg,,,,,," << format_number(report.spike_avg) << ",,,,,\n";
    out << kSchemaVersion << ",spike_acc,,,,,," << format_number(report.spike_acc) << ",,,,,\n";
  }
}

void write_csv(std::ostream& out, const AnalysisReport& report) {
  out << "schema_version,section,k,mean,ci_low,ci_high,nu,factor,sample_eigenvalue,prob,bic\n";
  for (std::size_t i = 0; i < report.eigenvalues.size(); ++i) {
    const EigenSummary& e = report.eigenvalues[i];
    out << kSchemaVersion << ",eigenvalue," << e.k << ',' << format_number(e.mean) << ','
        << format_number(e.ci_low) << ',' << format_number(e.ci_high) << ','
        << at_or_empty(report.nus, i) << ',' << at_or_empty(report.factors, i) << ','
        << at_or_empty(report.sample_eigenvalues, i) << ",,\n";
  }
  if (report.spike) {
    const SpikePosterior& s = *report.spike;
    for (std::size_t i = 0; i < s.support.size(); ++i) {
      out << kSchemaVersion << ",spike," << s.support[i] << ",,,,,,," << format_number(s.probs[i])
          << ',' << format_number(s.bic[i]) << '\n';
    }
  }
}

void write_csv(std::ostream& out, const RollingReport& report) {
  out << "schema_version,window,start_date,end_date,n_used,dropped_rows,map_k,entropy,ar_k,prior_a,"
         "ar_mean,ar_low,ar_high,ar_iw_mean,ar_iw_low,ar_iw_high,degraded,note\n";
  for (const WindowResult& w : report.windows) {
    out << kSchemaVersion << ',' << w.index << ',' << csv_field(w.start_date) << ','
        << csv_field(w.end_date) << ',' << w.n_used << ',' << w.dropped << ',' << w.map_k << ','
        << format_number(w.entropy) << ',' << w.ar_k << ',' << format_number(w.prior_a) << ','
        << format_number(w.ar_mean) << ','
        << format_number(w.ar_low) << ',' << format_number(w.ar_high) << ','
        << format_number(w.ar_iw_mean) << ',' << format_number(w.ar_iw_low) << ','
        << format_number(w.ar_iw_high) << ',' << (w.degraded ? 1 : 0) << ',' << csv_field(w.note)
        << '\n';
  }
}

Json to_json(const ValidationReport& report) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "validation";
  j["config"] = {{"seed", report.config.seed},
                 {"draws", report.config.draws},
                 {"instances", report.config.instances}};
  Json checks = Json::array();
  for (const ValidationCheck& c : report.checks) {
    checks.push_back({{"name", c.name},
                      {"value", number(c.value)},
                      {"threshold", c.threshold},
                      {"passed", c.passed},
                      {"detail", c.detail}});
  }
  j["checks"] = checks;
  j["all_passed"] = report.all_passed();
  return j;
}

void write_csv(std::ostream& out, const ValidationReport& report) {
  out << "schema_version,check,value,threshold,passed,detail\n";
  for (const ValidationCheck& c : report.checks) {
    out << kSchemaVersion << ',' << c.name << ',' << format_number(c.value) << ','
        << format_number(c.threshold) << ',' << (c.passed ? 1 : 0) << ',' << csv_field(c.detail)
        << '\n';
  }
}

}  // namespace spikecov
