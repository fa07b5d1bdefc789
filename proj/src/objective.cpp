#include "rsr/objective.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rsr/error.hpp"
#include "rsr/kernels.hpp"

namespace rsr {

namespace {

void require_positive_eps(double eps, const char* where) {
  if (!(eps > 0.0)) {
    throw Error(ErrorKind::NonPositiveEpsilon, std::string(where) + ": eps must be > 0");
  }
}

void require_ambient(const DataSet& data, Eigen::Index ambient, const char* where) {
  if (data.dim() != ambient) {
    throw Error(ErrorKind::DimensionMismatch, std::string(where) + ": data in R^" +
                                                  std::to_string(data.dim()) + ", subspace in R^" +
                                                  std::to_string(ambient));
  }
}

DataSet select(const Matrix& points, const std::vector<bool>& mask, bool keep) {
  std::vector<Eigen::Index> idx;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i] == keep) idx.push_back(static_cast<Eigen::Index>(i));
  }
  if (idx.empty()) {
    throw Error(keep ? ErrorKind::EmptyInliers : ErrorKind::EmptyOutliers, "mask selects no points");
  }
  Matrix sub(points.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) sub.col(static_cast<Eigen::Index>(j)) = points.col(idx[j]);
  return DataSet(std::move(sub), std::vector<bool>(idx.size(), keep));
}

}  // namespace

DataSet::DataSet(Matrix points, std::optional<std::vector<bool>> inlier_mask)
    : points_(std::move(points)), mask_(std::move(inlier_mask)) {
  if (points_.cols() == 0 || points_.rows() == 0) {
    throw Error(ErrorKind::EmptyInput, "DataSet: need at least one point of positive dimension");
  }
  if (!points_.allFinite()) {
    throw Error(ErrorKind::InvalidSpec, "DataSet: points contain NaN or Inf");
  }
  if (mask_ && static_cast<Eigen::Index>(mask_->size()) != points_.cols()) {
    throw Error(ErrorKind::InvalidSpec, "DataSet: mask length " + std::to_string(mask_->size()) +
                                            " does not match n = " + std::to_string(points_.cols()));
  }
}

const std::vector<bool>& DataSet::mask() const {
  if (!mask_) throw Error(ErrorKind::MissingMask, "DataSet has no inlier mask");
  return *mask_;
}

Eigen::Index DataSet::inlier_count() const {
  const auto& m = mask();
  return static_cast<Eigen::Index>(std::count(m.begin(), m.end(), true));
}

DataSet DataSet::inliers() const { return select(points_, mask(), true); }
DataSet DataSet::outliers() const { return select(points_, mask(), false); }

Vector subspace_distances(const DataSet& data, const LinearSubspace& subspace) {
  require_ambient(data, subspace.ambient_dim(), "subspace_distances");
  return kernels::residual_norms(data.points(), subspace.basis());
}

Vector affine_distances(const DataSet& data, const AffineSubspace& affine) {
  require_ambient(data, affine.ambient_dim(), "affine_distances");
  if (affine.offset.size() != affine.ambient_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "affine_distances: offset has wrong length");
  }
  return kernels::residual_norms(data.points(), affine.direction.basis(), affine.offset);
}

Vector irls_weights(const Vector& distances, double eps) {
  require_positive_eps(eps, "irls_weights");
  return distances.array().max(eps).inverse().matrix();
}

double smoothed_sum(const Vector& distances, double eps) {
  require_positive_eps(eps, "smoothed_sum");
  double total = 0.0;
  for (Eigen::Index i = 0; i < distances.size(); ++i) {
    const double d = distances(i);
    // Boundary d == eps goes to the quadratic branch; both agree there.
    total += d > eps ? d : 0.5 * eps + d * d / (2.0 * eps);
  }
  return total;
}

double lad_objective(const DataSet& data, const LinearSubspace& subspace) {
  return subspace_distances(data, subspace).sum();
}

double smoothed_objective(const DataSet& data, const LinearSubspace& subspace, double eps) {
  require_positive_eps(eps, "smoothed_objective");
  return smoothed_sum(subspace_distances(data, subspace), eps);
}

double smoothed_objective_affine(const DataSet& data, const AffineSubspace& affine, double eps) {
  require_positive_eps(eps, "smoothed_objective_affine");
  return smoothed_sum(affine_distances(data, affine), eps);
}

double majorizer(const DataSet& data, const LinearSubspace& subspace, const LinearSubspace& anchor,
                 double eps) {
  require_positive_eps(eps, "majorizer");
  const Vector at = subspace_distances(data, subspace);
  const Vector anchor_dist = subspace_distances(data, anchor);
  double total = 0.0;
  for (Eigen::Index i = 0; i < at.size(); ++i) {
    const double a = anchor_dist(i);
    const double radius = a > eps ? a : eps;
    total += 0.5 * radius + at(i) * at(i) / (2.0 * radius);
  }
  return total;
}

Matrix weighted_scatter(const DataSet& data, const LinearSubspace& subspace, double eps) {
  require_positive_eps(eps, "weighted_scatter");
  const Vector w = irls_weights(subspace_distances(data, subspace), eps);
  return kernels::weighted_scatter(data.points(), w);
}

double quantile(std::span<const double> values, double gamma) {
  if (values.empty()) throw Error(ErrorKind::EmptyInput, "quantile: no values");
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw Error(ErrorKind::GammaOutOfRange, "quantile: gamma must lie in (0, 1)");
  }
  const auto n = values.size();
  // The tiny offset keeps products such as 0.3 * 10 from rounding below 3.
  auto k = static_cast<std::size_t>(std::floor(gamma * static_cast<double>(n) + 1e-9));
  k = std::clamp<std::size_t>(k, 1, n);
  std::vector<double> sorted(values.begin(), values.end());
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k - 1), sorted.end());
  return sorted[k - 1];
}

}  // namespace rsr
