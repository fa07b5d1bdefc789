// rsr: command-line front end for data generation, single solves, the three
// experiment sweeps, assumption diagnostics and plotting.
//
// Exit codes: 0 success, 2 invalid configuration or arguments, 3 I/O failure,
// 1 any other error.

#include <omp.h>

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "rsr/afms.hpp"
#include "rsr/baselines.hpp"
#include "rsr/datagen.hpp"
#include "rsr/error.hpp"
#include "rsr/fms.hpp"
#include "rsr/harness.hpp"
#include "rsr/io.hpp"
#include "rsr/stats.hpp"

namespace fs = std::filesystem;
using namespace rsr;

namespace {

struct ConfigArgs {
  std::string config;
  std::vector<std::string> overrides;
};

void add_config_options(CLI::App* cmd, ConfigArgs& args) {
  cmd->add_option("--config", args.config, "key = value configuration file");
  cmd->add_option("--override", args.overrides, "key=value, applied after the file (repeatable)");
}

KeyValueConfig load_config(const ConfigArgs& args) {
  KeyValueConfig kv = args.config.empty() ? KeyValueConfig{} : KeyValueConfig::load(args.config);
  for (const auto& o : args.overrides) kv.apply_override(o);
  return kv;
}

// --out-dir beats RSR_OUTPUT_DIR, which beats the config and the default.
fs::path output_dir(const std::string& flag, const fs::path& fallback) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("RSR_OUTPUT_DIR"); env != nullptr && *env != '\0') return env;
  return fallback;
}

std::string value_or(const KeyValueConfig& kv, const std::string& key, const std::string& fallback) {
  return kv.has(key) ? kv.get(key) : fallback;
}

// ---- gen -------------------------------------------------------------------

ModelSpec model_from_config(const KeyValueConfig& kv) {
  const std::string model = value_or(kv, "model", "haystack");
  const auto num = [&](const std::string& key, double fallback) {
    return kv.has(key) ? parse_double(key, kv.get(key)) : fallback;
  };
  const auto idx = [&](const std::string& key, Eigen::Index fallback) {
    return kv.has(key) ? static_cast<Eigen::Index>(parse_int(key, kv.get(key))) : fallback;
  };
  const auto flag = [&](const std::string& key, bool fallback) {
    return kv.has(key) ? parse_bool(key, kv.get(key)) : fallback;
  };
  const auto seed = static_cast<std::uint64_t>(kv.has("seed") ? parse_int("seed", kv.get("seed")) : 1);
  static const std::vector<std::string> known = {"model", "seed",         "ambient",         "d",
                                                 "d_out", "n",            "n_in",            "n_out",
                                                 "sigma_in", "sigma_out", "inlier_fraction", "sphereize",
                                                 "orthogonal_outliers",   "offset_norm"};
  for (const auto& [key, value] : kv.values()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw Error(ErrorKind::ConfigInvalid, "unknown gen key '" + key + "'");
    }
  }
  if (model == "haystack") {
    Haystack h;
    h.ambient = idx("ambient", h.ambient);
    h.d = idx("d", h.d);
    h.n_in = idx("n_in", h.n_in);
    h.n_out = idx("n_out", h.n_out);
    h.sigma_in = num("sigma_in", h.sigma_in);
    h.sigma_out = num("sigma_out", h.sigma_out);
    return ModelSpec{h, seed};
  }
  if (model == "dual") {
    DualSubspaceAdversarial m;
    m.d = idx("d", m.d);
    m.d_out = idx("d_out", m.d_out);
    m.n = idx("n", m.n);
    m.inlier_fraction = num("inlier_fraction", m.inlier_fraction);
    m.sphereize = flag("sphereize", m.sphereize);
    m.orthogonal_outliers = flag("orthogonal_outliers", m.orthogonal_outliers);
    return ModelSpec{m, seed};
  }
  if (model == "affine") {
    AffineHaystack a;
    a.ambient = idx("ambient", a.ambient);
    a.d = idx("d", a.d);
    a.n_in = idx("n_in", a.n_in);
    a.n_out = idx("n_out", a.n_out);
    a.sigma_in = num("sigma_in", a.sigma_in);
    a.sigma_out = num("sigma_out", a.sigma_out);
    a.offset_norm = num("offset_norm", a.offset_norm);
    return ModelSpec{a, seed};
  }
  throw Error(ErrorKind::ConfigInvalid, "model must be haystack, dual or affine");
}

int run_gen(const ConfigArgs& args, const std::string& out_flag) {
  const GeneratedData g = generate(model_from_config(load_config(args)));
  const fs::path dir = output_dir(out_flag, "results/gen");
  write_dataset_csv(dir / "data.csv", g.data);
  write_matrix_csv(dir / "truth.csv", g.truth.basis());
  write_matrix_csv(dir / "offset.csv", g.offset.transpose());
  if (g.outlier_subspace) write_matrix_csv(dir / "outlier_subspace.csv", g.outlier_subspace->basis());
  std::cout << "wrote " << g.data.size() << " points in R^" << g.data.dim() << " (" << g.data.inlier_count()
            << " inliers) to " << dir.string() << "\n";
  return 0;
}

// ---- solve -----------------------------------------------------------------

struct SolveArgs {
  std::string data;
  std::string truth;
  std::string truth_offset;
  int d = 0;
  std::string method = "FMS-DS(0.1)";
  bool affine = false;
  int max_iter = 200;
  std::uint64_t seed = 0;
};

LinearSubspace read_subspace(const fs::path& path) { return orthonormalize(read_matrix_csv(path)); }

void write_trace(const fs::path& path, const IterationTrace& trace) {
  Matrix rows(static_cast<Eigen::Index>(trace.records.size()), 5);
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const auto& r = trace.records[i];
    const auto k = static_cast<Eigen::Index>(i);
    rows(k, 0) = r.k;
    rows(k, 1) = r.eps;
    rows(k, 2) = r.objective;
    rows(k, 3) = r.subspace_change;
    rows(k, 4) = r.error_to_truth.value_or(std::nan(""));
  }
  write_matrix_csv(path, rows);
}

int run_solve(const SolveArgs& a, const std::string& out_flag) {
  const DataSet data = read_dataset_csv(a.data);
  const MethodSpec method = parse_method(a.method);
  const fs::path dir = output_dir(out_flag, "results/solve");
  SolverConfig cfg;
  cfg.max_iter = a.max_iter;
  if (method.kind == MethodSpec::Kind::Fms) cfg.schedule = FixedEpsilon{method.param};
  if (method.kind == MethodSpec::Kind::FmsDs) cfg.schedule = DynamicSmoothing{method.param};
  const bool iterative = method.kind == MethodSpec::Kind::Fms || method.kind == MethodSpec::Kind::FmsDs;

  if (a.affine) {
    if (!iterative) throw Error(ErrorKind::ConfigInvalid, "--affine needs an FMS or FMS-DS method");
    std::optional<AffineSubspace> truth;
    if (!a.truth.empty()) {
      Vector offset = Vector::Zero(data.dim());
      if (!a.truth_offset.empty()) offset = read_matrix_csv(a.truth_offset).row(0).transpose();
      truth = AffineSubspace{read_subspace(a.truth), offset};
    }
    const AfmsResult res = solve_afms(data, a.d, CenteredPcaInit{}, cfg, truth ? &*truth : nullptr);
    write_matrix_csv(dir / "subspace.csv", res.affine.direction.basis());
    write_matrix_csv(dir / "offset.csv", res.affine.offset.transpose());
    write_trace(dir / "trace.csv", res.trace);
    std::cout << method.label() << " (affine): " << res.iterations << " iterations";
    if (truth) std::cout << ", distance to truth " << format_double(affine_rep_distance(res.affine, *truth));
    std::cout << "\n";
    for (const auto& w : res.trace.warnings) std::cerr << "warning: " << w << "\n";
    return 0;
  }

  std::optional<LinearSubspace> truth;
  if (!a.truth.empty()) truth = read_subspace(a.truth);
  LinearSubspace result;
  int iterations = 0;
  switch (method.kind) {
    case MethodSpec::Kind::Pca: result = pca_subspace(data, a.d, false).subspace; break;
    case MethodSpec::Kind::SphericalPca: result = spherical_pca_subspace(data, a.d); break;
    case MethodSpec::Kind::Tme: {
      TmeConfig tc;
      tc.reg_eps = method.param;
      const TmeFit fit = tme_subspace(data, a.d, tc);
      result = fit.subspace;
      iterations = fit.iterations;
      break;
    }
    case MethodSpec::Kind::Ransac: {
      RansacConfig rc;
      rc.num_candidates = static_cast<int>(method.param);
      rc.seed = a.seed;
      result = ransac_subspace(data, a.d, rc).subspace;
      break;
    }
    case MethodSpec::Kind::Fms:
    case MethodSpec::Kind::FmsDs: {
      const FmsResult res = solve_fms(data, a.d, PcaInit{}, cfg, truth ? &*truth : nullptr);
      result = res.subspace;
      iterations = res.iterations;
      write_trace(dir / "trace.csv", res.trace);
      for (const auto& w : res.trace.warnings) std::cerr << "warning: " << w << "\n";
      break;
    }
  }
  write_matrix_csv(dir / "subspace.csv", result.basis());
  std::cout << method.label() << ": " << iterations << " iterations, LAD " << format_double(lad_objective(data, result));
  if (truth) std::cout << ", error " << format_double(subspace_error(result, *truth));
  std::cout << "\n";
  return 0;
}

// ---- experiments -----------------------------------------------------------

int run_exp(Experiment e, const ConfigArgs& args, bool full, int threads, const std::string& out_flag) {
  ExperimentConfig cfg = build_config(e, load_config(args), full);
  cfg.output_dir = output_dir(out_flag, cfg.output_dir);
  if (threads > 0) cfg.threads = threads;
  const ExperimentOutput out = run_experiment(cfg);
  write_outputs(cfg, out);
  std::cout << "experiment,method,sweep_value,geometric_mean_error,failure_rate,mean_iterations\n";
  for (const auto& a : out.aggregates) {
    std::cout << a.experiment << ',' << a.method << ',' << format_double(a.sweep_value) << ','
              << format_double(a.geometric_mean_error) << ',' << format_double(a.failure_rate) << ','
              << format_double(a.mean_iterations) << "\n";
  }
  std::cout << "wrote " << out.results.size() << " trial rows to " << cfg.output_dir.string() << "\n";
  return 0;
}

// ---- check-assumptions -----------------------------------------------------

struct CheckArgs {
  std::string data;
  std::string truth;
  double theta0 = std::numbers::pi / 6;
  std::vector<double> eps{1e-1, 1e-3, 1e-6};
  double gamma = 0.1;
};

int run_check(const CheckArgs& a, const std::string& out_flag) {
  const DataSet data = read_dataset_csv(a.data);
  const LinearSubspace truth = read_subspace(a.truth);
  const AssumptionReport r = check_assumption2(data, truth, a.theta0, a.eps);
  const RefutationResult ref = refute_assumption1(data, truth, a.gamma);

  nlohmann::ordered_json j;
  j["s_in_estimate"] = r.s_in_estimate;
  j["s_in_exact"] = r.s_in_exact ? nlohmann::json(*r.s_in_exact) : nlohmann::json(nullptr);
  j["s_in_lower"] = r.s_in_lower;
  j["s_out_lower"] = r.s_out_lower;
  j["s_out_upper"] = r.s_out_upper;
  j["kappa1"] = r.kappa1;
  j["kappa2"] = r.kappa2;
  j["theta0"] = a.theta0;
  for (const auto& m : r.margins) {
    j["margins"].push_back({{"eps", m.eps},
                            {"sigma_d_reg", m.sigma_d_reg},
                            {"conservative_angle", m.conservative_angle},
                            {"conservative_balance", m.conservative_balance},
                            {"optimistic_angle", m.optimistic_angle},
                            {"optimistic_balance", m.optimistic_balance}});
  }
  j["assumption2"] = to_string(r.verdict);
  j["assumption1"] = {{"gamma", a.gamma},
                      {"refuted", ref.refuted},
                      {"reason", ref.reason},
                      {"best_fraction", ref.best_fraction}};
  const fs::path dir = output_dir(out_flag, "results/check");
  fs::create_directories(dir);
  const std::string text = j.dump(2) + "\n";
  std::ofstream out(dir / "report.json", std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + (dir / "report.json").string());
  std::cout << text;
  return 0;
}

// ---- plot ------------------------------------------------------------------

int run_plot(const std::string& input, const std::string& output) {
  emit_convergence_plot(read_plot_csv(input), output);
  std::cout << "wrote " << output << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust subspace recovery with FMS, FMS-DS and AFMS"};
  app.require_subcommand(1);
  std::string out_flag;
  app.add_option("--out-dir", out_flag, "output directory (overrides RSR_OUTPUT_DIR)");

  ConfigArgs gen_args;
  auto* gen = app.add_subcommand("gen", "generate a dataset; keys: model (haystack|dual|affine), seed, sizes");
  add_config_options(gen, gen_args);

  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "fit a subspace to a dataset CSV");
  solve->add_option("--data", solve_args.data, "dataset CSV")->required();
  solve->add_option("-d,--dim", solve_args.d, "subspace dimension")->required();
  solve->add_option("--method", solve_args.method, "PCA, SPCA, TME(eps), RANSAC(k), FMS(eps) or FMS-DS(gamma)");
  solve->add_option("--truth", solve_args.truth, "basis CSV of the true subspace");
  solve->add_option("--truth-offset", solve_args.truth_offset, "offset CSV of the true affine subspace");
  solve->add_flag("--affine", solve_args.affine, "fit an affine subspace (AFMS)");
  solve->add_option("--max-iter", solve_args.max_iter, "iteration cap");
  solve->add_option("--seed", solve_args.seed, "RANSAC seed");

  ConfigArgs exp_args;
  bool full = false;
  int threads = 0;
  std::vector<std::pair<CLI::App*, Experiment>> exps;
  for (auto [name, e] : {std::pair{"exp1", Experiment::Exp1}, std::pair{"exp2", Experiment::Exp2},
                         std::pair{"exp3", Experiment::Exp3}}) {
    auto* cmd = app.add_subcommand(name, std::string("run ") + name + " and write results, summary and plots");
    add_config_options(cmd, exp_args);
    cmd->add_flag("--full", full, "200 trials instead of the default 50");
    cmd->add_option("--threads", threads, "worker threads (0 keeps the OpenMP default)");
    exps.emplace_back(cmd, e);
  }

  CheckArgs check_args;
  auto* check = app.add_subcommand("check-assumptions", "report S_in, S_out, condition numbers and verdicts");
  check->add_option("--data", check_args.data, "dataset CSV with an is_inlier column")->required();
  check->add_option("--truth", check_args.truth, "basis CSV of L*")->required();
  check->add_option("--theta0", check_args.theta0, "angle theta0 in radians");
  check->add_option("--eps", check_args.eps, "eps grid")->delimiter(',');
  check->add_option("--gamma", check_args.gamma, "gamma for the Assumption 1 search");

  std::string plot_in, plot_out;
  auto* plot = app.add_subcommand("plot", "render a convergence series CSV as SVG");
  plot->add_option("--input", plot_in, "series CSV (series,iteration,log10_error)")->required();
  plot->add_option("--output", plot_out, "SVG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*gen) return run_gen(gen_args, out_flag);
    if (*solve) return run_solve(solve_args, out_flag);
    for (const auto& [cmd, e] : exps) {
      if (*cmd) return run_exp(e, exp_args, full, threads, out_flag);
    }
    if (*check) return run_check(check_args, out_flag);
    if (*plot) return run_plot(plot_in, plot_out);
  } catch (const Error& e) {
    std::cerr << "rsr: " << e.what() << "\n";
    if (e.kind() == ErrorKind::ConfigInvalid) return 2;
    if (e.kind() == ErrorKind::IoError) return 3;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "rsr: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
