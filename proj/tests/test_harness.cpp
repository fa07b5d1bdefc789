#include <doctest.h>

#include <omp.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "rsr/error.hpp"
#include "rsr/harness.hpp"

using namespace rsr;
namespace fs = std::filesystem;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an rsr::Error");
  return ErrorKind::IoError;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "rsr_test_harness" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> labels(const std::vector<MethodSpec>& methods) {
  std::vector<std::string> out;
  for (const auto& m : methods) out.push_back(m.label());
  return out;
}

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.experiment = Experiment::Custom;
  c.trials = 3;
  c.methods = {parse_method("PCA"), parse_method("FMS-DS(0.1)")};
  c.sweep = {0.3};
  c.n = 60;
  return c;
}

}  // namespace

TEST_CASE("method labels round trip") {
  for (const char* label : {"PCA", "SPCA", "TME(1e-10)", "RANSAC(200)", "FMS(1e-10)", "FMS-DS(0.1)", "FMS(1e-15)"}) {
    CHECK(parse_method(label).label() == label);
  }
  CHECK(parse_method("FMS-DS(0.5)").kind == MethodSpec::Kind::FmsDs);
  CHECK(parse_method("FMS-DS(0.5)").param == 0.5);
  for (const char* bad : {"LASSO", "FMS", "PCA(1)", "FMS-DS(1.5)", "FMS(-1)", "RANSAC(0)"}) {
    CHECK(kind_of([&] { parse_method(bad); }) == ErrorKind::ConfigInvalid);
  }
}

TEST_CASE("experiment defaults") {
  const ExperimentConfig e1 = exp1_defaults();
  CHECK(e1.n == 160);
  CHECK(e1.d_values == std::vector<int>{3, 10});
  CHECK(e1.d_out_values == std::vector<int>{1, 5, 10});
  CHECK(e1.max_iter == 200);
  CHECK(e1.trials == 50);
  CHECK(labels(e1.methods) ==
        std::vector<std::string>{"PCA", "TME(1e-10)", "RANSAC(200)", "FMS(1e-10)", "FMS-DS(0.5)", "FMS-DS(0.1)"});

  const ExperimentConfig e2 = exp2_defaults();
  CHECK(e2.d_values == std::vector<int>{3});
  CHECK(e2.d_out_values == std::vector<int>{1});
  CHECK(e2.n == 200);
  CHECK(e2.init == InitKind::Saddle);
  CHECK(e2.orthogonal_outliers);
  CHECK(e2.sweep.front() == 0.0);
  CHECK(e2.sweep.back() == 0.5);
  CHECK(labels(e2.methods) ==
        std::vector<std::string>{"FMS(1e-3)", "FMS(1e-10)", "FMS(1e-15)", "FMS-DS(0.1)", "FMS-DS(0.5)"});

  const ExperimentConfig e3 = exp3_defaults();
  CHECK(e3.n_in == 100);
  CHECK(e3.n_out == 30);
  CHECK(e3.record_traces);
  CHECK(e3.sweep_name == "init");

  for (const auto& c : {e1, e2, e3}) CHECK_NOTHROW(c.validate());
}

TEST_CASE("build_config applies keys on top of the defaults") {
  KeyValueConfig kv;
  kv.set("trials", "7");
  kv.set("methods", "PCA, FMS(1e-3)");
  kv.set("sweep", "0.1,0.2");
  kv.set("d", "3");
  kv.set("sphereize", "false");
  const ExperimentConfig c = build_config(Experiment::Exp1, kv);
  CHECK(c.trials == 7);
  CHECK(labels(c.methods) == std::vector<std::string>{"PCA", "FMS(1e-3)"});
  CHECK(c.sweep == std::vector<double>{0.1, 0.2});
  CHECK(c.d_values == std::vector<int>{3});
  CHECK_FALSE(c.sphereize);
  CHECK(c.n == 160);

  CHECK(build_config(Experiment::Exp2, KeyValueConfig{}, true).trials == 200);
  CHECK(build_config(Experiment::Exp2, kv, true).trials == 7);

  KeyValueConfig unknown;
  unknown.set("colour", "red");
  CHECK(kind_of([&] { build_config(Experiment::Exp1, unknown); }) == ErrorKind::ConfigInvalid);
  KeyValueConfig bad;
  bad.set("trials", "many");
  CHECK(kind_of([&] { build_config(Experiment::Exp1, bad); }) == ErrorKind::ConfigInvalid);
}

TEST_CASE("config validation") {
  const auto broken = [](auto&& edit) {
    ExperimentConfig c = small_config();
    edit(c);
    return kind_of([&] { c.validate(); });
  };
  CHECK(broken([](ExperimentConfig& c) { c.trials = 0; }) == ErrorKind::ConfigInvalid);
  CHECK(broken([](ExperimentConfig& c) { c.sweep.clear(); }) == ErrorKind::ConfigInvalid);
  CHECK(broken([](ExperimentConfig& c) { c.methods.clear(); }) == ErrorKind::ConfigInvalid);
  CHECK(broken([](ExperimentConfig& c) { c.sweep = {1.0}; }) == ErrorKind::ConfigInvalid);
  CHECK(broken([](ExperimentConfig& c) { c.init = InitKind::Saddle; }) == ErrorKind::ConfigInvalid);
  CHECK(broken([](ExperimentConfig& c) { c.sweep_name = "noise"; }) == ErrorKind::ConfigInvalid);
  CHECK(broken([](ExperimentConfig& c) { c.max_iter = 0; }) == ErrorKind::ConfigInvalid);
  CHECK(kind_of([] {
          ExperimentConfig c = small_config();
          c.trials = -1;
          run_experiment(c);
        }) == ErrorKind::ConfigInvalid);
}

TEST_CASE("run_experiment rows, failures and aggregates") {
  const ExperimentOutput out = run_experiment(small_config());
  REQUIRE(out.results.size() == 6);
  for (const auto& r : out.results) {
    CHECK(r.failed == (r.final_error > kFailureThreshold));
    CHECK(r.log10_error == std::log10(std::max(r.final_error, 1e-300)));
    CHECK(r.final_error >= 0.0);
    CHECK(r.final_error <= 1.0 + 1e-12);
  }
  CHECK(out.results[0].method == "PCA");
  CHECK(out.results[1].method == "FMS-DS(0.1)");
  CHECK(out.results[0].seed == out.results[1].seed);
  CHECK(out.results[0].seed != out.results[2].seed);

  // Recompute every aggregate directly from the rows.
  std::map<std::string, std::vector<const TrialResult*>> groups;
  for (const auto& r : out.results) groups[r.method].push_back(&r);
  REQUIRE(out.aggregates.size() == 2);
  for (const auto& a : out.aggregates) {
    const auto& rows = groups.at(a.method);
    double logs = 0, iters = 0, fails = 0;
    for (const auto* r : rows) {
      logs += r->log10_error;
      iters += r->iterations;
      fails += r->failed;
    }
    CHECK(a.trials == static_cast<int>(rows.size()));
    CHECK(a.geometric_mean_error == doctest::Approx(std::pow(10.0, logs / rows.size())).epsilon(1e-12));
    CHECK(a.mean_iterations == doctest::Approx(iters / rows.size()));
    CHECK(a.failure_rate == doctest::Approx(fails / rows.size()));
  }
  CHECK(aggregate(out.results).size() == out.aggregates.size());
}

TEST_CASE("a failing method is recorded and the sweep continues") {
  // Two points cannot support a 3-dimensional fit.
  ExperimentConfig c = small_config();
  c.n = 2;
  c.methods = {parse_method("FMS-DS(0.1)")};
  const ExperimentOutput out = run_experiment(c);
  REQUIRE(out.results.size() == 3);
  for (const auto& r : out.results) {
    CHECK(r.failed);
    CHECK(r.final_error == 1.0);
  }
}

TEST_CASE("csv emission") {
  const fs::path dir = scratch("csv");
  emit_csv({}, dir / "empty.csv");
  CHECK(slurp(dir / "empty.csv") == "experiment,method,sweep_value,trial,final_error,log10_error,iterations,failed,seed\n");

  const ExperimentOutput out = run_experiment(small_config());
  emit_csv(out.results, dir / "a.csv");
  emit_csv(run_experiment(small_config()).results, dir / "b.csv");
  const std::string a = slurp(dir / "a.csv");
  CHECK(a == slurp(dir / "b.csv"));
  CHECK(std::count(a.begin(), a.end(), '\n') == 7);
  std::ofstream(dir / "blocker").put('x');
  CHECK(kind_of([&] { emit_csv(out.results, dir / "blocker" / "results.csv"); }) == ErrorKind::IoError);
}

TEST_CASE("csv output does not depend on the thread count") {
  ExperimentConfig c = small_config();
  c.trials = 8;
  c.methods = {parse_method("RANSAC(50)"), parse_method("FMS(1e-10)"), parse_method("FMS-DS(0.5)")};
  c.threads = 1;
  const std::string one = results_csv(run_experiment(c).results);
  c.threads = 4;
  CHECK(results_csv(run_experiment(c).results) == one);
}

TEST_CASE("trial seeds are distinct across cells") {
  std::vector<std::uint64_t> seen;
  for (std::size_t s = 0; s < 3; ++s) {
    for (std::size_t w = 0; w < 3; ++w) {
      for (int t = 0; t < 20; ++t) seen.push_back(trial_seed(1, s, w, t));
    }
  }
  std::sort(seen.begin(), seen.end());
  CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
  CHECK(trial_seed(1, 0, 0, 0) != trial_seed(2, 0, 0, 0));
}

TEST_CASE("trace averaging holds the last value of short traces") {
  TrialResult a, b;
  a.experiment = b.experiment = "exp3";
  a.method = b.method = "FMS-DS(0.1)";
  a.error_trace = {1e-1, 1e-3};
  b.error_trace = {1e-3, 1e-5, 1e-7};
  const auto series = average_traces({a, b});
  REQUIRE(series.size() == 1);
  REQUIRE(series[0].log10_error.size() == 3);
  CHECK(series[0].log10_error[0] == doctest::Approx(-2.0));
  CHECK(series[0].log10_error[1] == doctest::Approx(-4.0));
  CHECK(series[0].log10_error[2] == doctest::Approx(-5.0));
  TrialResult none;
  CHECK(average_traces({none}).empty());
}

TEST_CASE("convergence plot") {
  const fs::path dir = scratch("plot");
  emit_convergence_plot({PlotSeries{"FMS-DS(0.1)", {0.0, -3.5, -9.25, -20.0}}}, dir / "plot.svg");
  const std::string svg = slurp(dir / "plot.svg");
  std::size_t polylines = 0;
  for (std::size_t p = svg.find("<polyline"); p != std::string::npos; p = svg.find("<polyline", p + 1)) ++polylines;
  CHECK(polylines == 1);
  CHECK(svg.find("FMS-DS(0.1)") != std::string::npos);
  CHECK(svg.find("iteration") != std::string::npos);

  const auto back = read_plot_csv(dir / "plot.csv");
  REQUIRE(back.size() == 1);
  CHECK(back[0].label == "FMS-DS(0.1)");
  CHECK(back[0].log10_error == std::vector<double>{0.0, -3.5, -9.25, kPlotFloor});
  CHECK(svg.find("data-log10=\"0 -3.5 -9.25 -16\"") != std::string::npos);

  emit_convergence_plot({PlotSeries{"a", {-1.0}}, PlotSeries{"b & c", {-2.0, -4.0}}}, dir / "two.svg");
  CHECK(read_plot_csv(dir / "two.csv").size() == 2);
  CHECK(slurp(dir / "two.svg").find("b &amp; c") != std::string::npos);

  CHECK(kind_of([&] { emit_convergence_plot({}, dir / "none.svg"); }) == ErrorKind::IoError);
  CHECK(kind_of([&] { read_plot_csv(dir / "missing.csv"); }) == ErrorKind::IoError);
}

TEST_CASE("write_outputs produces results, summary and convergence files") {
  ExperimentConfig c = exp3_defaults();
  c.trials = 2;
  c.methods = {parse_method("FMS-DS(0.1)")};
  c.output_dir = scratch("outputs");
  const ExperimentOutput out = run_experiment(c);
  for (const auto& r : out.results) CHECK(r.error_trace.size() == static_cast<std::size_t>(r.iterations) + 1);
  write_outputs(c, out);
  CHECK(fs::exists(c.output_dir / "results.csv"));
  CHECK(fs::exists(c.output_dir / "summary.csv"));
  CHECK(fs::exists(c.output_dir / "convergence.svg"));
  CHECK(read_plot_csv(c.output_dir / "convergence.csv").size() == 2);
}
