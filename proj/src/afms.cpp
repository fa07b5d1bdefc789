#include "rsr/afms.hpp"

#include <cmath>
#include <string>

#include "rsr/baselines.hpp"
#include "rsr/error.hpp"
#include "rsr/kernels.hpp"
#include "rsr/spectral.hpp"

namespace rsr {

namespace {

void require_shape(const DataSet& data, Eigen::Index d, Eigen::Index ambient, const char* where) {
  if (data.dim() != ambient) {
    throw Error(ErrorKind::DimensionMismatch, std::string(where) + ": data and subspace live in different spaces");
  }
  if (d < 1 || d >= ambient) throw Error(ErrorKind::DimensionMismatch, std::string(where) + ": need 1 <= d < D");
  if (data.size() < d + 1) throw Error(ErrorKind::RankDeficient, std::string(where) + ": need n >= d + 1");
}

void require_centered_rank(const DataSet& data, Eigen::Index d, const char* where) {
  const Vector mean = data.points().rowwise().mean();
  if (numerical_rank(data.points(), mean) < d) {
    throw Error(ErrorKind::RankDeficient, std::string(where) + ": centered data span fewer than d dimensions");
  }
}

AffineSubspace step_from_distances(const DataSet& data, Eigen::Index d, const Vector& dist, double eps,
                                   std::vector<std::string>* warnings) {
  Vector w = irls_weights(dist, eps);
  w /= w.maxCoeff();
  const double total = w.sum();
  Vector mean;
  if (total > 0.0 && std::isfinite(total)) {
    mean = kernels::weighted_sum(data.points(), w) / total;
  } else {
    if (warnings != nullptr) warnings->push_back("afms_step: weight sum degenerate, using unweighted mean");
    mean = data.points().rowwise().mean();
  }
  TopEigenspace top = weighted_top_eigenspace(data.points(), w, d, mean);
  if (top.tie && warnings != nullptr) {
    warnings->push_back("EigenvalueTie: lambda_d and lambda_{d+1} agree to 1e-12 relative");
  }
  return AffineSubspace{std::move(top.subspace), std::move(mean)};
}

double affine_move(const AffineSubspace& next, const AffineSubspace& prev) {
  const double turn = subspace_error(next.direction, prev.direction);
  const double shift = next.direction.residual(next.offset - prev.offset).norm() / (1.0 + next.offset.norm());
  return std::max(turn, shift);
}

}  // namespace

AffineSubspace afms_step(const DataSet& data, const AffineSubspace& current, double eps,
                         std::vector<std::string>* warnings) {
  require_shape(data, current.dim(), current.ambient_dim(), "afms_step");
  if (current.offset.size() != current.ambient_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "afms_step: offset has wrong length");
  }
  if (!(eps > 0.0)) throw Error(ErrorKind::NonPositiveEpsilon, "afms_step: eps must be > 0");
  require_centered_rank(data, current.dim(), "afms_step");
  const Vector dist = affine_distances(data, current);
  return step_from_distances(data, current.dim(), dist, eps, warnings);
}

AfmsResult solve_afms(const DataSet& data, Eigen::Index d, const AffineInit& init,
                      const SolverConfig& config, const AffineSubspace* truth) {
  require_shape(data, d, data.dim(), "solve_afms");
  if (config.max_iter < 1) throw Error(ErrorKind::ConfigInvalid, "solve_afms: max_iter must be >= 1");
  require_centered_rank(data, d, "solve_afms");

  AffineSubspace current = std::visit(
      [&](const auto& i) -> AffineSubspace {
        using I = std::decay_t<decltype(i)>;
        if constexpr (std::is_same_v<I, CenteredPcaInit>) {
          PcaFit fit = pca_subspace(data, d, true);
          return AffineSubspace{std::move(fit.subspace), std::move(fit.mean)};
        } else {
          if (i.ambient_dim() != data.dim() || i.dim() != d || i.offset.size() != data.dim()) {
            throw Error(ErrorKind::InitDimensionMismatch, "solve_afms: initial affine subspace has wrong shape");
          }
          return i;
        }
      },
      init);

  double prev_eps = std::holds_alternative<DynamicSmoothing>(config.schedule)
                        ? std::get<DynamicSmoothing>(config.schedule).eps_init
                        : std::get<FixedEpsilon>(config.schedule).eps;
  AfmsResult result;
  double change = 0.0;
  Vector dist = affine_distances(data, current);
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
      if (truth != nullptr) rec.error_to_truth = affine_rep_distance(current, *truth);
      result.trace.records.push_back(rec);
    }
    if (config.record_iterates) result.iterates.push_back(current);
    if (k == config.max_iter || (k > 0 && change < config.subspace_tol)) break;
    AffineSubspace next = step_from_distances(data, d, dist, eps, &result.trace.warnings);
    Vector next_dist = affine_distances(data, next);
    if (smoothed_sum(next_dist, eps) > objective + kStepRejectSlack * (1.0 + std::abs(objective))) {
      result.trace.warnings.push_back("StepRejected: F_eps rose at the rounding limit; stopping at iteration " +
                                      std::to_string(k));
      break;
    }
    change = affine_move(next, current);
    current = std::move(next);
    dist = std::move(next_dist);
    prev_eps = eps;
  }
  result.affine = std::move(current);
  result.iterations = k;
  return result;
}

}  // namespace rsr
