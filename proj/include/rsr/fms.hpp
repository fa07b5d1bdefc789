#pragma once

#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rsr/geometry.hpp"
#include "rsr/objective.hpp"

namespace rsr {

/// Constant regularization eps_k = eps.
struct FixedEpsilon {
  double eps = 1e-10;
};

/// Dynamic smoothing: eps_k = min(eps_{k-1}, q_gamma(current distances)).
struct DynamicSmoothing {
  double gamma = 0.1;
  double eps_init = std::numeric_limits<double>::infinity();
};

using EpsilonSchedule = std::variant<FixedEpsilon, DynamicSmoothing>;

inline constexpr double kEpsilonFloor = 1e-300;

struct SolverConfig {
  EpsilonSchedule schedule = DynamicSmoothing{};
  int max_iter = 200;
  /// Stop once ||P_k - P_{k-1}||_2 drops below this.
  double subspace_tol = 1e-15;
  bool record_trace = true;
  /// Keep every accepted iterate (for audits of consecutive steps).
  bool record_iterates = false;
};

/// A step that raises F_{eps_k} by more than this relative amount is rejected
/// and the solver stops at the current iterate. It only triggers once the
/// distances fall below the rounding level of their own computation.
inline constexpr double kStepRejectSlack = 1e-12;

/// One row per iterate L^(k): the eps chosen from it, F_{eps_k}(L^(k)), the move
/// ||P_k - P_{k-1}||_2 that produced it (0 for the initial iterate) and, when a
/// ground truth was supplied, its error (sin theta_1 for linear runs,
/// affine_rep_distance for affine runs).
struct IterationRecord {
  int k = 0;
  double eps = 0.0;
  double objective = 0.0;
  double subspace_change = 0.0;
  std::optional<double> error_to_truth;
};

struct IterationTrace {
  std::vector<IterationRecord> records;
  std::vector<std::string> warnings;

  /// F_{eps_k} never rises by more than rel_slack * (1 + |F|).
  bool objective_nonincreasing(double rel_slack = 1e-12) const;
  bool eps_nonincreasing() const;
};

struct PcaInit {};
using LinearInit = std::variant<PcaInit, LinearSubspace>;

struct FmsResult {
  LinearSubspace subspace;
  IterationTrace trace;
  int iterations = 0;  // number of accepted T_eps applications
  std::vector<LinearSubspace> iterates;  // L^(0..iterations) when record_iterates
};

/// T_eps(L): span of the top-d eigenvectors of S_{L,eps}. Throws DimensionMismatch
/// when d >= D and RankDeficient when the data span fewer than d dimensions.
/// Near-ties lambda_d ~ lambda_{d+1} are reported through warnings.
LinearSubspace fms_step(const DataSet& data, const LinearSubspace& current, double eps,
                        std::vector<std::string>* warnings = nullptr);

double next_epsilon(const EpsilonSchedule& schedule, double prev_eps, const Vector& distances);

/// FMS / FMS-DS. Each iteration picks eps_k from the current distances and then
/// applies T_{eps_k}; see SolverConfig for the stopping rule and
/// kStepRejectSlack for the safeguard.
FmsResult solve_fms(const DataSet& data, Eigen::Index d, const LinearInit& init,
                    const SolverConfig& config, const LinearSubspace* truth = nullptr);

struct DecreaseBound {
  double lhs = 0.0;  // F_eps(L_k) - F_eps(L_{k+1})
  double rhs = 0.0;  // ||P S Q||_F^2 / (2 ||S||_2) with S = S_{L_k, eps}
  bool holds = false;
};

DecreaseBound decrease_bound_check(const DataSet& data, const LinearSubspace& current,
                                   const LinearSubspace& next, double eps);

}  // namespace rsr
