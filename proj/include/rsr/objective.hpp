#pragma once

#include <optional>
#include <span>
#include <vector>

#include "rsr/geometry.hpp"

namespace rsr {

/// D x n point cloud (one point per column) with an optional ground-truth
/// inlier mask. The mask is only ever read by diagnostics and the harness.
class DataSet {
 public:
  DataSet() = default;
  /// Throws EmptyInput for n == 0, InvalidSpec for non-finite entries or a
  /// mask of the wrong length.
  explicit DataSet(Matrix points, std::optional<std::vector<bool>> inlier_mask = std::nullopt);

  const Matrix& points() const noexcept { return points_; }
  Eigen::Index dim() const noexcept { return points_.rows(); }
  Eigen::Index size() const noexcept { return points_.cols(); }
  auto point(Eigen::Index i) const { return points_.col(i); }

  bool has_mask() const noexcept { return mask_.has_value(); }
  const std::vector<bool>& mask() const;  // MissingMask if absent
  Eigen::Index inlier_count() const;

  /// Sub-collections selected by the mask (MissingMask if absent). The result
  /// may be empty only in the sense of size() == 0 being rejected; callers that
  /// need "no inliers" semantics should check inlier_count() first.
  DataSet inliers() const;
  DataSet outliers() const;

 private:
  Matrix points_;
  std::optional<std::vector<bool>> mask_;
};

/// dist(x_i, L) for every point.
Vector subspace_distances(const DataSet& data, const LinearSubspace& subspace);
Vector affine_distances(const DataSet& data, const AffineSubspace& affine);

/// IRLS weights 1 / max(eps, d_i). eps must be positive.
Vector irls_weights(const Vector& distances, double eps);

/// sum_i h_eps(d_i) with h_eps(d) = d for d > eps, eps/2 + d^2/(2 eps) otherwise.
double smoothed_sum(const Vector& distances, double eps);

/// F(L) = sum of distances (least absolute deviations).
double lad_objective(const DataSet& data, const LinearSubspace& subspace);
/// F_eps(L).
double smoothed_objective(const DataSet& data, const LinearSubspace& subspace, double eps);
/// F_eps^(a)(A).
double smoothed_objective_affine(const DataSet& data, const AffineSubspace& affine, double eps);

/// G_eps(L, L0): the quadratic majorizer of F_eps built at anchor L0.
double majorizer(const DataSet& data, const LinearSubspace& subspace, const LinearSubspace& anchor,
                 double eps);

/// S_{L,eps} = sum_x x x^T / max(eps, dist(x, L)).
Matrix weighted_scatter(const DataSet& data, const LinearSubspace& subspace, double eps);

/// k-th smallest value with k = max(1, floor(gamma n)). EmptyInput for no values;
/// GammaOutOfRange unless 0 < gamma < 1.
double quantile(std::span<const double> values, double gamma);
inline double quantile(const Vector& values, double gamma) {
  return quantile(std::span<const double>(values.data(), static_cast<std::size_t>(values.size())), gamma);
}

}  // namespace rsr
