#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rsr/geometry.hpp"
#include "rsr/objective.hpp"

namespace rsr {

/// min over unit u in L* of sum |u^T x|.
struct SinEstimate {
  double value = 0.0;
  bool exact = false;  // true for d = 1, where the minimizer is unique up to sign
};

/// For d >= 2 a multi-start projected subgradient search (32 starts, 500 steps
/// each) followed by a vertex polish; the result is an upper bound on S_in.
SinEstimate s_in(const DataSet& inliers, const LinearSubspace& truth, std::uint64_t seed = 0x5eed);

/// Certified lower bound on S_in: max(lambda_min(sum y y^T / ||y||), sigma_d(Y))
/// over the coordinates y = U*^T x of the inliers. Equals S_in when d = 1.
double s_in_lower_bound(const DataSet& inliers, const LinearSubspace& truth);

/// ||sum P_L x x^T Q_L / dist(x, L)||_2 at one subspace L; points closer than
/// 1e-12 to L are left out.
double s_out_value(const DataSet& outliers, const LinearSubspace& subspace);

struct SoutBounds {
  double lower = 0.0;  // best value found by multi-start ascent
  double upper = 0.0;  // min(sum ||x||, sqrt(n_out) ||X_out||_2)
};

SoutBounds s_out_bounds(const DataSet& outliers, Eigen::Index d, std::uint64_t seed = 0x5eed);

struct ConditionNumbers {
  double kappa1 = 0.0;  // max / min over unit u in L* of sum |u^T x|
  double kappa2 = 0.0;  // sigma_1(X_in)^2 / sigma_d(X_in)^2
};

ConditionNumbers condition_numbers(const DataSet& inliers, const LinearSubspace& truth,
                                   std::uint64_t seed = 0x5eed);

enum class Verdict { Satisfied, Refuted, Inconclusive };
std::string to_string(Verdict v);

/// Slack of both global conditions at one eps, once with the conservative
/// statistics and once with the optimistic ones. Nonnegative means the
/// inequality holds.
struct ConditionMargin {
  double eps = 0.0;
  double sigma_d_reg = 0.0;  // sigma_d of sum_in x x^T / max(||x||, eps)
  double conservative_angle = 0.0;
  double conservative_balance = 0.0;
  double optimistic_angle = 0.0;
  double optimistic_balance = 0.0;
};

struct AssumptionReport {
  double s_in_estimate = 0.0;
  std::optional<double> s_in_exact;
  double s_in_lower = 0.0;
  double s_out_lower = 0.0;
  double s_out_upper = 0.0;
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  std::vector<ConditionMargin> margins;
  Verdict verdict = Verdict::Inconclusive;
};

/// Evaluates sin(theta0) >= S_out / sigma_d and cos(theta0) S_in >= sqrt(d) S_out
/// at every eps. Satisfied needs the conservative pair (certified S_in lower
/// bound, S_out upper bound) to pass everywhere; Refuted means even the
/// optimistic pair (S_in search value, S_out ascent value) fails somewhere.
AssumptionReport check_assumption2(const DataSet& data, const LinearSubspace& truth, double theta0,
                                   const std::vector<double>& eps_grid, std::uint64_t seed = 0x5eed);

struct RefutationConfig {
  int budget = 2000;  // random data spans tried, split between L and L0 candidates
  int random_subspaces = 16;
  std::uint64_t seed = 0x5eed;
};

struct RefutationResult {
  bool refuted = false;
  std::string reason;
  double best_fraction = 0.0;  // largest |X cap (L0 u L)| / |X| found
};

/// Searches for a subspace pair that puts at least gamma n points on
/// L0 u L. A NotRefuted result is not a certificate.
RefutationResult refute_assumption1(const DataSet& data, const LinearSubspace& truth, double gamma,
                                    const RefutationConfig& config = {},
                                    const std::vector<LinearSubspace>& extra_candidates = {});

struct BoundAudit {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
  bool applicable = true;
};

/// |F_out(L) - F_out(L*)| / (F_in(L) - F_in(L*)) against
/// sqrt(d) S_out_upper sum theta / (S_in sum sin theta). S_in is exact for
/// d = 1 and the certified lower bound otherwise.
BoundAudit lemma4_audit(const DataSet& data, const LinearSubspace& truth, const LinearSubspace& subspace);

/// ||P_L S_{L,eps} Q_L||_F against cos(theta_1) S_in / (2 sqrt d) - S_out_upper.
/// Not applicable unless at least half the inliers sit farther than eps from L.
BoundAudit lemma3_audit(const DataSet& data, const LinearSubspace& truth, const LinearSubspace& subspace,
                        double eps);

}  // namespace rsr
