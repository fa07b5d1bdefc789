#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rsr/io.hpp"

namespace rsr {

enum class Experiment { Exp1, Exp2, Exp3, Custom };
std::string to_string(Experiment e);

/// One recovery method and its parameter. Labels round-trip through
/// parse_method: "PCA", "SPCA", "TME(1e-10)", "RANSAC(200)", "FMS(1e-10)",
/// "FMS-DS(0.1)".
struct MethodSpec {
  enum class Kind { Pca, SphericalPca, Tme, Ransac, Fms, FmsDs };
  Kind kind = Kind::FmsDs;
  double param = 0.1;

  std::string label() const;
};
MethodSpec parse_method(const std::string& label);

enum class InitKind { Pca, Saddle };

struct ExperimentConfig {
  Experiment experiment = Experiment::Custom;
  int trials = 50;
  std::uint64_t base_seed = 1;
  std::vector<MethodSpec> methods;
  /// "outlier_fraction": sweep values are outlier fractions of n points.
  /// "init": 0 runs PCA init with a random outlier subspace, 1 runs the
  /// saddle init with an outlier subspace orthogonal to L*; sizes are n_in / n_out.
  std::string sweep_name = "outlier_fraction";
  std::vector<double> sweep;
  std::vector<int> d_values{3};
  std::vector<int> d_out_values{1};
  int n = 160;
  int n_in = 100;
  int n_out = 30;
  InitKind init = InitKind::Pca;
  bool orthogonal_outliers = false;
  bool sphereize = true;
  int max_iter = 200;
  bool record_traces = false;
  std::filesystem::path output_dir = "results";
  int threads = 0;  // 0 keeps the OpenMP default

  void validate() const;  // ConfigInvalid
};

ExperimentConfig exp1_defaults();
ExperimentConfig exp2_defaults();
ExperimentConfig exp3_defaults();

/// Starts from the experiment's defaults and applies every key in cfg. The
/// accepted keys are the ExperimentConfig field names; list values are comma
/// separated. full = true sets trials to 200 unless trials is given.
ExperimentConfig build_config(Experiment e, const KeyValueConfig& cfg, bool full = false);

inline constexpr double kFailureThreshold = 0.1;
inline constexpr double kRecoveryThreshold = 1e-9;

struct TrialResult {
  std::string experiment;  // e.g. exp1_d3_dout1
  std::string method;
  double sweep_value = 0.0;
  int trial = 0;
  double final_error = 0.0;
  double log10_error = 0.0;
  int iterations = 0;
  double wall_time_seconds = 0.0;
  bool failed = false;
  std::uint64_t seed = 0;
  std::vector<double> error_trace;  // per iterate, when traces are recorded
};

struct Aggregate {
  std::string experiment;
  std::string method;
  double sweep_value = 0.0;
  int trials = 0;
  double geometric_mean_error = 0.0;  // 10^(mean log10 error)
  double failure_rate = 0.0;
  double mean_iterations = 0.0;
};

struct ExperimentOutput {
  std::vector<TrialResult> results;  // sorted by (experiment, sweep, method order, trial)
  std::vector<Aggregate> aggregates;
};

/// Seed of the dataset shared by every method for (setting, sweep index, trial).
std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t setting, std::size_t sweep_index, int trial);

ExperimentOutput run_experiment(const ExperimentConfig& cfg);

/// Pure fold over trial rows.
std::vector<Aggregate> aggregate(const std::vector<TrialResult>& results);

/// Header: experiment,method,sweep_value,trial,final_error,log10_error,iterations,failed,seed
void emit_csv(const std::vector<TrialResult>& results, const std::filesystem::path& path);
std::string results_csv(const std::vector<TrialResult>& results);
void emit_summary_csv(const std::vector<Aggregate>& aggregates, const std::filesystem::path& path);

struct PlotSeries {
  std::string label;
  std::vector<double> log10_error;  // one value per iteration
};

inline constexpr double kPlotFloor = -16.0;

/// Mean log10 error per iteration over trials of each (experiment, sweep, method);
/// a trace that stopped early holds its last value.
std::vector<PlotSeries> average_traces(const std::vector<TrialResult>& results);

/// SVG line chart, one polyline per series, values clamped at kPlotFloor. The
/// clamped values are also written to the same path with a .csv extension
/// (columns series,iteration,log10_error).
void emit_convergence_plot(const std::vector<PlotSeries>& series, const std::filesystem::path& path);
std::vector<PlotSeries> read_plot_csv(const std::filesystem::path& path);

/// Writes results.csv, summary.csv and, when traces exist, convergence.svg/.csv
/// into cfg.output_dir.
void write_outputs(const ExperimentConfig& cfg, const ExperimentOutput& out);

}  // namespace rsr
