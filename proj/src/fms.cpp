#include "rsr/fms.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rsr/baselines.hpp"
#include "rsr/error.hpp"
#include "rsr/kernels.hpp"
#include "rsr/spectral.hpp"

namespace rsr {

namespace {

void require_step_shape(const DataSet& data, const LinearSubspace& current) {
  if (data.dim() != current.ambient_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "fms_step: data and subspace live in different spaces");
  }
  if (current.dim() >= current.ambient_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "fms_step: need d < D");
  }
}

// T_eps from precomputed distances; the caller has already checked rank.
LinearSubspace step_from_distances(const DataSet& data, Eigen::Index d, const Vector& dist, double eps,
                                   std::vector<std::string>* warnings) {
  // The eigenspace is scale free; dividing by the largest weight keeps the
  // scatter finite even at the 1e-300 eps floor.
  Vector w = irls_weights(dist, eps);
  w /= w.maxCoeff();
  TopEigenspace top = weighted_top_eigenspace(data.points(), w, d);
  if (top.tie && warnings != nullptr) {
    warnings->push_back("EigenvalueTie: lambda_d and lambda_{d+1} agree to 1e-12 relative");
  }
  return std::move(top.subspace);
}

}  // namespace

bool IterationTrace::objective_nonincreasing(double rel_slack) const {
  for (std::size_t i = 1; i < records.size(); ++i) {
    const double prev = records[i - 1].objective;
    if (records[i].objective > prev + rel_slack * (1.0 + std::abs(prev))) return false;
  }
  return true;
}

bool IterationTrace::eps_nonincreasing() const {
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].eps > records[i - 1].eps) return false;
  }
  return true;
}

LinearSubspace fms_step(const DataSet& data, const LinearSubspace& current, double eps,
                        std::vector<std::string>* warnings) {
  require_step_shape(data, current);
  if (!(eps > 0.0)) throw Error(ErrorKind::NonPositiveEpsilon, "fms_step: eps must be > 0");
  if (numerical_rank(data.points()) < current.dim()) {
    throw Error(ErrorKind::RankDeficient, "fms_step: scatter has rank below d");
  }
  const Vector dist = kernels::residual_norms(data.points(), current.basis());
  return step_from_distances(data, current.dim(), dist, eps, warnings);
}

double next_epsilon(const EpsilonSchedule& schedule, double prev_eps, const Vector& distances) {
  const double eps = std::visit(
      [&](const auto& s) -> double {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, FixedEpsilon>) {
          if (!(s.eps > 0.0)) throw Error(ErrorKind::NonPositiveEpsilon, "FixedEpsilon must be > 0");
          return s.eps;
        } else {
          if (distances.size() == 0) throw Error(ErrorKind::EmptyInput, "next_epsilon: no distances");
          return std::min(prev_eps, quantile(distances, s.gamma));
        }
      },
      schedule);
  return std::max(eps, kEpsilonFloor);
}

FmsResult solve_fms(const DataSet& data, Eigen::Index d, const LinearInit& init,
                    const SolverConfig& config, const LinearSubspace* truth) {
  if (d < 1 || d >= data.dim()) throw Error(ErrorKind::DimensionMismatch, "solve_fms: need 1 <= d < D");
  if (data.size() < d) throw Error(ErrorKind::RankDeficient, "solve_fms: need n >= d");
  if (config.max_iter < 1) throw Error(ErrorKind::ConfigInvalid, "solve_fms: max_iter must be >= 1");
  if (numerical_rank(data.points()) < d) {
    throw Error(ErrorKind::RankDeficient, "solve_fms: data span fewer than d dimensions");
  }

  LinearSubspace current = std::visit(
      [&](const auto& i) -> LinearSubspace {
        using I = std::decay_t<decltype(i)>;
        if constexpr (std::is_same_v<I, PcaInit>) {
          return pca_subspace(data, d, false).subspace;
        } else {
          if (i.ambient_dim() != data.dim() || i.dim() != d) {
            throw Error(ErrorKind::InitDimensionMismatch, "solve_fms: initial subspace has wrong shape");
          }
          return i;
        }
      },
      init);

  double prev_eps = std::holds_alternative<DynamicSmoothing>(config.schedule)
                        ? std::get<DynamicSmoothing>(config.schedule).eps_init
                        : std::get<FixedEpsilon>(config.schedule).eps;
  FmsResult result;
  double change = 0.0;
  Vector dist = kernels::residual_norms(data.points(), current.basis());
  int k = 0;
  for (;; ++k) {
    const double eps = next_epsilon(config.schedule, prev_eps, dist);
    const double objective = smoothed_sum(dist, eps);
    if (config.record_trace) {
      IterationRecord rec;
      rec.k = k;
      rec.eps = eps;
      rec.objective = objective;
      rec.subspace_change = change;
      if (truth != nullptr) rec.error_to_truth = subspace_error(current, *truth);
      result.trace.records.push_back(rec);
    }
    if (config.record_iterates) result.iterates.push_back(current);
    if (k == config.max_iter || (k > 0 && change < config.subspace_tol)) break;
    LinearSubspace next = step_from_distances(data, d, dist, eps, &result.trace.warnings);
    Vector next_dist = kernels::residual_norms(data.points(), next.basis());
    if (smoothed_sum(next_dist, eps) > objective + kStepRejectSlack * (1.0 + std::abs(objective))) {
      result.trace.warnings.push_back("StepRejected: F_eps rose at the rounding limit; stopping at iteration " +
                                      std::to_string(k));
      break;
    }
    change = subspace_error(next, current);
    current = std::move(next);
    dist = std::move(next_dist);
    prev_eps = eps;
  }
  result.subspace = std::move(current);
  result.iterations = k;
  return result;
}

DecreaseBound decrease_bound_check(const DataSet& data, const LinearSubspace& current,
                                   const LinearSubspace& next, double eps) {
  DecreaseBound out;
  out.lhs = smoothed_objective(data, current, eps) - smoothed_objective(data, next, eps);

  const Vector w = irls_weights(subspace_distances(data, current), eps);
  const double scale = w.maxCoeff();
  const Vector scaled = w / scale;
  const Matrix& basis = current.basis();
  // U^T S Q = sum_i w_i (U^T x_i)(Q x_i)^T, built from the factors so the
  // residual part keeps full relative accuracy.
  const Matrix coords = basis.transpose() * data.points();
  const Matrix residual = data.points() - basis * coords;
  const Matrix off_diagonal = (coords * scaled.asDiagonal()) * residual.transpose();
  const double off_norm = off_diagonal.norm();
  const double spectral = weighted_top_eigenspace(data.points(), scaled, 1).eigenvalues(0);
  out.rhs = spectral > 0.0 ? 0.5 * (off_norm / spectral) * (off_norm * scale) : 0.0;
  out.holds = out.lhs >= out.rhs - 1e-9 * (1.0 + std::abs(out.lhs));
  return out;
}

}  // namespace rsr
