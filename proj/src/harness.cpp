#include "rsr/harness.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "rsr/baselines.hpp"
#include "rsr/datagen.hpp"
#include "rsr/error.hpp"
#include "rsr/fms.hpp"
#include "rsr/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rsr {

namespace {

std::string method_name(MethodSpec::Kind k) {
  switch (k) {
    case MethodSpec::Kind::Pca: return "PCA";
    case MethodSpec::Kind::SphericalPca: return "SPCA";
    case MethodSpec::Kind::Tme: return "TME";
    case MethodSpec::Kind::Ransac: return "RANSAC";
    case MethodSpec::Kind::Fms: return "FMS";
    case MethodSpec::Kind::FmsDs: return "FMS-DS";
  }
  return "?";
}

// 1e-3 rather than 0.001; plain decimals when they are no longer.
std::string compact_number(double v) {
  const std::string plain = format_double(v);
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::scientific);
  std::string sci(buf.data(), res.ptr);
  const auto e = sci.find('e');
  if (e == std::string::npos) return plain;
  std::string exponent = sci.substr(e + 1);
  const bool negative = exponent.front() == '-';
  exponent.erase(0, exponent.find_first_not_of("+-"));
  exponent.erase(0, std::min(exponent.find_first_not_of('0'), exponent.size() - 1));
  sci = sci.substr(0, e) + "e" + (negative ? "-" : "") + exponent;
  return sci.size() < plain.size() ? sci : plain;
}

bool takes_param(MethodSpec::Kind k) { return k != MethodSpec::Kind::Pca && k != MethodSpec::Kind::SphericalPca; }

std::string setting_label(const ExperimentConfig& cfg, int d, int d_out) {
  return to_string(cfg.experiment) + "_d" + std::to_string(d) + "_dout" + std::to_string(d_out);
}

double safe_log10(double err) { return std::log10(std::max(err, 1e-300)); }

struct Job {
  std::size_t setting;
  std::size_t sweep_index;
  int trial;
};

struct TrialData {
  GeneratedData gen;
  InitKind init;
};

TrialData make_trial_data(const ExperimentConfig& cfg, int d, int d_out, double sweep, std::uint64_t seed) {
  DualSubspaceAdversarial model;
  model.d = d;
  model.d_out = d_out;
  model.sphereize = cfg.sphereize;
  InitKind init = cfg.init;
  if (cfg.sweep_name == "init") {
    model.n = cfg.n_in + cfg.n_out;
    model.inlier_fraction = static_cast<double>(cfg.n_in) / static_cast<double>(model.n);
    const bool saddle = sweep != 0.0;
    model.orthogonal_outliers = saddle;
    init = saddle ? InitKind::Saddle : InitKind::Pca;
  } else {
    model.n = cfg.n;
    model.inlier_fraction = 1.0 - sweep;
    model.orthogonal_outliers = cfg.orthogonal_outliers;
  }
  return TrialData{generate(ModelSpec{model, seed}), init};
}

struct MethodRun {
  LinearSubspace subspace;
  int iterations = 0;
  std::vector<double> trace;
};

MethodRun run_method(const MethodSpec& m, const TrialData& td, int d, int max_iter, bool traces,
                     std::uint64_t seed) {
  const DataSet& data = td.gen.data;
  MethodRun run;
  switch (m.kind) {
    case MethodSpec::Kind::Pca:
      run.subspace = pca_subspace(data, d, false).subspace;
      break;
    case MethodSpec::Kind::SphericalPca:
      run.subspace = spherical_pca_subspace(data, d);
      break;
    case MethodSpec::Kind::Tme: {
      TmeConfig tc;
      tc.reg_eps = m.param;
      tc.max_iter = max_iter;
      TmeFit fit = tme_subspace(data, d, tc);
      run.subspace = std::move(fit.subspace);
      run.iterations = fit.iterations;
      break;
    }
    case MethodSpec::Kind::Ransac: {
      RansacConfig rc;
      rc.num_candidates = static_cast<int>(m.param);
      rc.seed = CounterRng::stream_seed(seed, 0x7a11);
      run.subspace = ransac_subspace(data, d, rc).subspace;
      run.iterations = rc.num_candidates;
      break;
    }
    case MethodSpec::Kind::Fms:
    case MethodSpec::Kind::FmsDs: {
      SolverConfig sc;
      if (m.kind == MethodSpec::Kind::Fms) {
        sc.schedule = FixedEpsilon{m.param};
      } else {
        sc.schedule = DynamicSmoothing{m.param};
      }
      sc.max_iter = max_iter;
      sc.record_trace = traces;
      LinearInit init = PcaInit{};
      if (td.init == InitKind::Saddle) {
        init = orthogonal_saddle_init(td.gen.truth, *td.gen.outlier_subspace, d);
      }
      FmsResult res = solve_fms(data, d, init, sc, traces ? &td.gen.truth : nullptr);
      run.subspace = std::move(res.subspace);
      run.iterations = res.iterations;
      if (traces) {
        for (const auto& r : res.trace.records) run.trace.push_back(*r.error_to_truth);
      }
      break;
    }
  }
  return run;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fixed2(double v) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(2);
  s << v;
  return s.str();
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out = open_out(path);
  out << text;
  out.flush();
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

std::vector<int> parse_int_list(const std::string& key, const std::string& text) {
  std::vector<int> out;
  for (const auto& cell : split_list(text)) out.push_back(static_cast<int>(parse_int(key, cell)));
  return out;
}

}  // namespace

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::Exp1: return "exp1";
    case Experiment::Exp2: return "exp2";
    case Experiment::Exp3: return "exp3";
    case Experiment::Custom: return "custom";
  }
  return "custom";
}

std::string MethodSpec::label() const {
  if (!takes_param(kind)) return method_name(kind);
  if (kind == Kind::Ransac) return "RANSAC(" + std::to_string(static_cast<long long>(param)) + ")";
  return method_name(kind) + "(" + compact_number(param) + ")";
}

MethodSpec parse_method(const std::string& label) {
  const std::string text = label;
  const auto open = text.find('(');
  const std::string name = text.substr(0, open);
  MethodSpec m;
  bool found = false;
  for (auto k : {MethodSpec::Kind::Pca, MethodSpec::Kind::SphericalPca, MethodSpec::Kind::Tme,
                 MethodSpec::Kind::Ransac, MethodSpec::Kind::Fms, MethodSpec::Kind::FmsDs}) {
    if (method_name(k) == name) {
      m.kind = k;
      found = true;
    }
  }
  if (!found) throw Error(ErrorKind::ConfigInvalid, "unknown method '" + label + "'");
  if (!takes_param(m.kind)) {
    if (open != std::string::npos) throw Error(ErrorKind::ConfigInvalid, name + " takes no parameter");
    m.param = 0.0;
    return m;
  }
  if (open == std::string::npos || text.back() != ')') {
    throw Error(ErrorKind::ConfigInvalid, "method '" + label + "' needs a parameter, e.g. " + name + "(0.1)");
  }
  m.param = parse_double(label, text.substr(open + 1, text.size() - open - 2));
  const bool ok = m.kind == MethodSpec::Kind::FmsDs ? (m.param > 0.0 && m.param < 1.0)
                  : m.kind == MethodSpec::Kind::Ransac
                      ? (m.param >= 1.0 && m.param == std::floor(m.param))
                      : m.param > 0.0;
  if (!ok) throw Error(ErrorKind::ConfigInvalid, "method '" + label + "' has an out-of-range parameter");
  return m;
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::ConfigInvalid, what); };
  if (trials < 1) fail("trials must be >= 1");
  if (sweep.empty()) fail("sweep grid is empty");
  if (methods.empty()) fail("no methods");
  if (d_values.empty() || d_out_values.empty()) fail("d and d_out lists must be nonempty");
  for (int d : d_values) {
    if (d < 1) fail("d must be >= 1");
  }
  for (int d : d_out_values) {
    if (d < 1) fail("d_out must be >= 1");
  }
  if (max_iter < 1) fail("max_iter must be >= 1");
  if (threads < 0) fail("threads must be >= 0");
  if (sweep_name == "outlier_fraction") {
    if (n < 1) fail("n must be >= 1");
    for (double s : sweep) {
      if (!(s >= 0.0 && s < 1.0)) fail("outlier fractions must lie in [0, 1)");
    }
    if (init == InitKind::Saddle && !orthogonal_outliers) fail("init = saddle needs orthogonal_outliers = true");
  } else if (sweep_name == "init") {
    if (n_in < 1 || n_out < 0) fail("n_in must be >= 1 and n_out >= 0");
    for (double s : sweep) {
      if (s != 0.0 && s != 1.0) fail("init sweep values must be 0 (pca) or 1 (saddle)");
    }
  } else {
    fail("sweep_name must be outlier_fraction or init");
  }
}

ExperimentConfig exp1_defaults() {
  ExperimentConfig c;
  c.experiment = Experiment::Exp1;
  c.methods = {parse_method("PCA"),        parse_method("TME(1e-10)"),  parse_method("RANSAC(200)"),
               parse_method("FMS(1e-10)"), parse_method("FMS-DS(0.5)"), parse_method("FMS-DS(0.1)")};
  c.sweep = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
  c.d_values = {3, 10};
  c.d_out_values = {1, 5, 10};
  c.n = 160;
  c.output_dir = "results/exp1";
  return c;
}

ExperimentConfig exp2_defaults() {
  ExperimentConfig c;
  c.experiment = Experiment::Exp2;
  c.methods = {parse_method("FMS(1e-3)"), parse_method("FMS(1e-10)"), parse_method("FMS(1e-15)"),
               parse_method("FMS-DS(0.1)"), parse_method("FMS-DS(0.5)")};
  c.sweep = {0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5};
  c.n = 200;
  c.init = InitKind::Saddle;
  c.orthogonal_outliers = true;
  // Raw Gaussian scales; after normalization the saddle sits at the edge of
  // the escape region for gamma = 0.5.
  c.sphereize = false;
  c.output_dir = "results/exp2";
  return c;
}

ExperimentConfig exp3_defaults() {
  ExperimentConfig c;
  c.experiment = Experiment::Exp3;
  c.methods = {parse_method("FMS(1e-3)"), parse_method("FMS(1e-10)"), parse_method("FMS(1e-15)"),
               parse_method("FMS-DS(0.1)"), parse_method("FMS-DS(0.5)")};
  c.sweep_name = "init";
  c.sweep = {0.0, 1.0};
  c.n_in = 100;
  c.n_out = 30;
  c.record_traces = true;
  c.sphereize = false;
  c.output_dir = "results/exp3";
  return c;
}

ExperimentConfig build_config(Experiment e, const KeyValueConfig& kv, bool full) {
  ExperimentConfig c;
  switch (e) {
    case Experiment::Exp1: c = exp1_defaults(); break;
    case Experiment::Exp2: c = exp2_defaults(); break;
    case Experiment::Exp3: c = exp3_defaults(); break;
    case Experiment::Custom: c.methods = {parse_method("FMS-DS(0.1)")}; c.sweep = {0.5}; break;
  }
  if (full) c.trials = 200;
  for (const auto& [key, value] : kv.values()) {
    if (key == "trials") c.trials = static_cast<int>(parse_int(key, value));
    else if (key == "base_seed") c.base_seed = static_cast<std::uint64_t>(parse_int(key, value));
    else if (key == "methods") {
      c.methods.clear();
      for (const auto& m : split_list(value)) c.methods.push_back(parse_method(m));
    } else if (key == "sweep_name") c.sweep_name = value;
    else if (key == "sweep") {
      c.sweep.clear();
      for (const auto& s : split_list(value)) c.sweep.push_back(parse_double(key, s));
    } else if (key == "d") c.d_values = parse_int_list(key, value);
    else if (key == "d_out") c.d_out_values = parse_int_list(key, value);
    else if (key == "n") c.n = static_cast<int>(parse_int(key, value));
    else if (key == "n_in") c.n_in = static_cast<int>(parse_int(key, value));
    else if (key == "n_out") c.n_out = static_cast<int>(parse_int(key, value));
    else if (key == "init") {
      if (value == "pca") c.init = InitKind::Pca;
      else if (value == "saddle") c.init = InitKind::Saddle;
      else throw Error(ErrorKind::ConfigInvalid, "init must be pca or saddle");
    } else if (key == "orthogonal_outliers") c.orthogonal_outliers = parse_bool(key, value);
    else if (key == "sphereize") c.sphereize = parse_bool(key, value);
    else if (key == "max_iter") c.max_iter = static_cast<int>(parse_int(key, value));
    else if (key == "record_traces") c.record_traces = parse_bool(key, value);
    else if (key == "output_dir") c.output_dir = value;
    else if (key == "threads") c.threads = static_cast<int>(parse_int(key, value));
    else throw Error(ErrorKind::ConfigInvalid, "unknown config key '" + key + "'");
  }
  c.validate();
  return c;
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t setting, std::size_t sweep_index, int trial) {
  const std::uint64_t cell = CounterRng::stream_seed(base_seed, (static_cast<std::uint64_t>(setting) << 32) |
                                                                     static_cast<std::uint64_t>(sweep_index));
  return CounterRng::stream_seed(cell, static_cast<std::uint64_t>(trial));
}

ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<std::pair<int, int>> settings;
  for (int d : cfg.d_values) {
    for (int d_out : cfg.d_out_values) settings.emplace_back(d, d_out);
  }
  std::vector<Job> jobs;
  for (std::size_t s = 0; s < settings.size(); ++s) {
    for (std::size_t w = 0; w < cfg.sweep.size(); ++w) {
      for (int t = 0; t < cfg.trials; ++t) jobs.push_back(Job{s, w, t});
    }
  }
  const std::size_t n_methods = cfg.methods.size();
  std::vector<TrialResult> results(jobs.size() * n_methods);

#ifdef _OPENMP
  const int threads = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
#else
  const int threads = 1;
#endif
  (void)threads;
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const Job& job = jobs[j];
    const auto [d, d_out] = settings[job.setting];
    const double sweep = cfg.sweep[job.sweep_index];
    const std::uint64_t seed = trial_seed(cfg.base_seed, job.setting, job.sweep_index, job.trial);
    std::optional<TrialData> td;
    std::string gen_error;
    try {
      td = make_trial_data(cfg, d, d_out, sweep, seed);
    } catch (const Error& e) {
      gen_error = e.what();
    }
    for (std::size_t m = 0; m < n_methods; ++m) {
      TrialResult& r = results[j * n_methods + m];
      r.experiment = setting_label(cfg, d, d_out);
      r.method = cfg.methods[m].label();
      r.sweep_value = sweep;
      r.trial = job.trial;
      r.seed = seed;
      const auto start = std::chrono::steady_clock::now();
      try {
        if (!td) throw Error(ErrorKind::InvalidSpec, gen_error);
        MethodRun run = run_method(cfg.methods[m], *td, d, cfg.max_iter, cfg.record_traces, seed);
        r.final_error = subspace_error(run.subspace, td->gen.truth);
        r.iterations = run.iterations;
        r.error_trace = std::move(run.trace);
      } catch (const Error&) {
        // Recorded as a failed trial; the sweep carries on.
        r.final_error = 1.0;
        r.iterations = 0;
      }
      r.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      r.log10_error = safe_log10(r.final_error);
      r.failed = r.final_error > kFailureThreshold;
    }
  }
  ExperimentOutput out;
  out.results = std::move(results);
  out.aggregates = aggregate(out.results);
  return out;
}

std::vector<Aggregate> aggregate(const std::vector<TrialResult>& results) {
  std::vector<Aggregate> out;
  std::map<std::tuple<std::string, std::string, double>, std::size_t> index;
  std::vector<double> log_sums;
  std::vector<double> iter_sums;
  std::vector<int> fails;
  for (const auto& r : results) {
    const auto key = std::make_tuple(r.experiment, r.method, r.sweep_value);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, out.size()).first;
      out.push_back(Aggregate{r.experiment, r.method, r.sweep_value, 0, 0.0, 0.0, 0.0});
      log_sums.push_back(0.0);
      iter_sums.push_back(0.0);
      fails.push_back(0);
    }
    const std::size_t i = it->second;
    out[i].trials += 1;
    log_sums[i] += r.log10_error;
    iter_sums[i] += r.iterations;
    fails[i] += r.failed ? 1 : 0;
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double t = out[i].trials;
    out[i].geometric_mean_error = std::pow(10.0, log_sums[i] / t);
    out[i].failure_rate = fails[i] / t;
    out[i].mean_iterations = iter_sums[i] / t;
  }
  return out;
}

std::string results_csv(const std::vector<TrialResult>& results) {
  std::ostringstream s;
  s << "experiment,method,sweep_value,trial,final_error,log10_error,iterations,failed,seed\n";
  for (const auto& r : results) {
    s << r.experiment << ',' << r.method << ',' << format_double(r.sweep_value) << ',' << r.trial << ','
      << format_double(r.final_error) << ',' << format_double(r.log10_error) << ',' << r.iterations << ','
      << (r.failed ? 1 : 0) << ',' << r.seed << '\n';
  }
  return s.str();
}

void emit_csv(const std::vector<TrialResult>& results, const std::filesystem::path& path) {
  write_text(path, results_csv(results));
}

void emit_summary_csv(const std::vector<Aggregate>& aggregates, const std::filesystem::path& path) {
  std::ostringstream s;
  s << "experiment,method,sweep_value,trials,geometric_mean_error,failure_rate,mean_iterations\n";
  for (const auto& a : aggregates) {
    s << a.experiment << ',' << a.method << ',' << format_double(a.sweep_value) << ',' << a.trials << ','
      << format_double(a.geometric_mean_error) << ',' << format_double(a.failure_rate) << ','
      << format_double(a.mean_iterations) << '\n';
  }
  write_text(path, s.str());
}

std::vector<PlotSeries> average_traces(const std::vector<TrialResult>& results) {
  std::vector<PlotSeries> out;
  std::map<std::string, std::size_t> index;
  std::vector<std::vector<std::vector<double>>> groups;
  for (const auto& r : results) {
    if (r.error_trace.empty()) continue;
    const std::string label = r.experiment + " " + format_double(r.sweep_value) + " " + r.method;
    auto it = index.find(label);
    if (it == index.end()) {
      it = index.emplace(label, out.size()).first;
      out.push_back(PlotSeries{label, {}});
      groups.emplace_back();
    }
    groups[it->second].push_back(r.error_trace);
  }
  for (std::size_t g = 0; g < out.size(); ++g) {
    std::size_t len = 0;
    for (const auto& t : groups[g]) len = std::max(len, t.size());
    out[g].log10_error.assign(len, 0.0);
    for (const auto& t : groups[g]) {
      for (std::size_t k = 0; k < len; ++k) out[g].log10_error[k] += safe_log10(t[std::min(k, t.size() - 1)]);
    }
    for (auto& v : out[g].log10_error) v /= static_cast<double>(groups[g].size());
  }
  return out;
}

void emit_convergence_plot(const std::vector<PlotSeries>& series, const std::filesystem::path& path) {
  if (series.empty()) throw Error(ErrorKind::IoError, "emit_convergence_plot: no series");
  std::vector<PlotSeries> shown = series;
  std::size_t len = 1;
  double top = 0.0;
  for (auto& s : shown) {
    for (auto& v : s.log10_error) {
      v = std::max(v, kPlotFloor);
      top = std::max(top, v);
    }
    len = std::max(len, s.log10_error.size());
    for (char& c : s.label) {
      if (c == ',') c = ';';
    }
  }
  top = std::ceil(top);

  constexpr double width = 720, height = 440, left = 70, right = 220, upper = 30, lower = 50;
  const double plot_w = width - left - right;
  const double plot_h = height - upper - lower;
  const double x_span = len > 1 ? static_cast<double>(len - 1) : 1.0;
  auto px = [&](double k) { return left + plot_w * k / x_span; };
  auto py = [&](double v) { return upper + plot_h * (top - v) / (top - kPlotFloor); };
  const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<g stroke=\"black\" stroke-width=\"1\">\n"
      << "<line x1=\"" << left << "\" y1=\"" << upper + plot_h << "\" x2=\"" << left + plot_w << "\" y2=\""
      << upper + plot_h << "\"/>\n"
      << "<line x1=\"" << left << "\" y1=\"" << upper << "\" x2=\"" << left << "\" y2=\"" << upper + plot_h
      << "\"/>\n</g>\n";
  svg << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (double v = top; v >= kPlotFloor; v -= 2.0) {
    svg << "<text x=\"" << left - 8 << "\" y=\"" << fixed2(py(v) + 4) << "\" text-anchor=\"end\">" << v
        << "</text>\n";
  }
  const std::size_t ticks = std::min<std::size_t>(len - 1, 10);
  for (std::size_t t = 0; t <= ticks && len > 1; ++t) {
    const auto k = static_cast<double>(std::llround(x_span * t / std::max<std::size_t>(ticks, 1)));
    svg << "<text x=\"" << fixed2(px(k)) << "\" y=\"" << upper + plot_h + 16 << "\" text-anchor=\"middle\">" << k
        << "</text>\n";
  }
  svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 12 << "\" text-anchor=\"middle\">iteration</text>\n";
  svg << "<text transform=\"rotate(-90)\" x=\"" << -(upper + plot_h / 2) << "\" y=\"18\" text-anchor=\"middle\">"
      << "log10 error</text>\n</g>\n";

  std::ostringstream csv;
  csv << "series,iteration,log10_error\n";
  for (std::size_t i = 0; i < shown.size(); ++i) {
    const auto& s = shown[i];
    const char* color = palette[i % 10];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" data-series=\""
        << xml_escape(s.label) << "\" data-log10=\"";
    for (std::size_t k = 0; k < s.log10_error.size(); ++k) svg << (k ? " " : "") << format_double(s.log10_error[k]);
    svg << "\" points=\"";
    for (std::size_t k = 0; k < s.log10_error.size(); ++k) {
      svg << (k ? " " : "") << fixed2(px(static_cast<double>(k))) << ',' << fixed2(py(s.log10_error[k]));
      csv << s.label << ',' << k << ',' << format_double(s.log10_error[k]) << '\n';
    }
    svg << "\"/>\n";
    const double ly = upper + 14.0 * static_cast<double>(i) + 6;
    svg << "<line x1=\"" << left + plot_w + 12 << "\" y1=\"" << ly << "\" x2=\"" << left + plot_w + 32 << "\" y2=\""
        << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << left + plot_w + 38 << "\" y=\"" << ly + 4
        << "\" font-family=\"sans-serif\" font-size=\"10\">" << xml_escape(s.label) << "</text>\n";
  }
  svg << "</svg>\n";
  write_text(path, svg.str());
  std::filesystem::path csv_path = path;
  csv_path.replace_extension(".csv");
  write_text(csv_path, csv.str());
}

std::vector<PlotSeries> read_plot_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  if (line.rfind("series,iteration,log10_error", 0) != 0) {
    throw Error(ErrorKind::IoError, path.string() + ": not a convergence series file");
  }
  std::vector<PlotSeries> out;
  std::map<std::string, std::size_t> index;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) throw Error(ErrorKind::IoError, "bad row: " + line);
    const std::string label = line.substr(0, c1);
    auto it = index.find(label);
    if (it == index.end()) {
      it = index.emplace(label, out.size()).first;
      out.push_back(PlotSeries{label, {}});
    }
    try {
      out[it->second].log10_error.push_back(parse_double("log10_error", line.substr(c2 + 1)));
    } catch (const Error&) {
      throw Error(ErrorKind::IoError, "bad value in row: " + line);
    }
  }
  return out;
}

void write_outputs(const ExperimentConfig& cfg, const ExperimentOutput& out) {
  emit_csv(out.results, cfg.output_dir / "results.csv");
  emit_summary_csv(out.aggregates, cfg.output_dir / "summary.csv");
  const auto series = average_traces(out.results);
  if (!series.empty()) emit_convergence_plot(series, cfg.output_dir / "convergence.svg");
}

}  // namespace rsr
