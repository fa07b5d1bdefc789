#pragma once

#include <cstdint>
#include <optional>
#include <variant>

#include "rsr/geometry.hpp"
#include "rsr/objective.hpp"

namespace rsr {

/// Inliers N(0, sigma_in^2 P_{L*} / d) on a uniformly random L*, outliers
/// N(0, sigma_out^2 I / D).
struct Haystack {
  Eigen::Index ambient = 10;
  Eigen::Index d = 3;
  Eigen::Index n_in = 1000;
  Eigen::Index n_out = 1000;
  double sigma_in = 1.0;
  double sigma_out = 1.0;
};

/// Inliers N(0, Sigma_in / d) with L* = range(Sigma_in), outliers
/// N(0, Sigma_out / D). n_in = round(alpha_in n).
struct GeneralizedHaystack {
  Matrix sigma_in;
  Matrix sigma_out;
  Eigen::Index n = 1000;
  double alpha_in = 0.5;
};

/// D = d + d_out. Inliers are standard Gaussian on a random d-dimensional L*,
/// outliers standard Gaussian on a d_out-dimensional outlier subspace. The
/// outlier subspace is random unless orthogonal_outliers is set, in which case
/// it is the orthogonal complement of L*.
struct DualSubspaceAdversarial {
  Eigen::Index d = 3;
  Eigen::Index d_out = 1;
  Eigen::Index n = 160;
  double inlier_fraction = 0.5;  // in (0, 1]
  bool sphereize = true;
  bool orthogonal_outliers = false;
};

/// Haystack translated by m* (a random direction scaled to offset_norm).
struct AffineHaystack {
  Eigen::Index ambient = 10;
  Eigen::Index d = 3;
  Eigen::Index n_in = 300;
  Eigen::Index n_out = 100;
  double sigma_in = 1.0;
  double sigma_out = 1.0;
  double offset_norm = 1.0;
};

using ModelVariant = std::variant<Haystack, GeneralizedHaystack, DualSubspaceAdversarial, AffineHaystack>;

struct ModelSpec {
  ModelVariant model;
  std::uint64_t seed = 0;
};

/// Points come inliers first, then outliers; the mask marks inliers.
struct GeneratedData {
  DataSet data;
  LinearSubspace truth;
  Vector offset;  // m*; zero for the linear models
  std::optional<LinearSubspace> outlier_subspace;

  AffineSubspace affine_truth() const { return AffineSubspace{truth, offset}; }
};

/// Deterministic in spec.seed. Throws InvalidSpec for inconsistent sizes.
GeneratedData generate(const ModelSpec& spec);

/// Scales every point to unit norm, keeping the mask. ZeroPoint on a zero column.
DataSet sphereize(const DataSet& data);

/// First d-1 basis directions of L* plus the first direction of L_out.
/// IncompatibleGeometry unless L_out is orthogonal to L* and d - 1 <= dim L*.
LinearSubspace orthogonal_saddle_init(const LinearSubspace& truth, const LinearSubspace& outlier_subspace,
                                      Eigen::Index d);

}  // namespace rsr
