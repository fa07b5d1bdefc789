#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rsr/geometry.hpp"
#include "rsr/objective.hpp"

namespace rsr {

struct PcaFit {
  LinearSubspace subspace;
  Vector mean;  // zero vector for uncentered PCA
};

/// Top-d eigenspace of sum x x^T, or of sum (x - xbar)(x - xbar)^T when centered.
PcaFit pca_subspace(const DataSet& data, Eigen::Index d, bool centered);

/// PCA of the points scaled to unit norm. Points with norm < 1e-12 are skipped
/// and reported in warnings.
LinearSubspace spherical_pca_subspace(const DataSet& data, Eigen::Index d,
                                      std::vector<std::string>* warnings = nullptr);

struct TmeConfig {
  double reg_eps = 1e-10;
  int max_iter = 200;
  double tol = 1e-10;  // relative Frobenius change of the shape matrix
};

struct TmeFit {
  LinearSubspace subspace;
  Matrix shape;  // converged trace-D shape matrix
  int iterations = 0;
  std::vector<std::string> warnings;
};

/// Regularized Tyler M-estimator, started from the trace-normalized sample
/// covariance.
TmeFit tme_subspace(const DataSet& data, Eigen::Index d, const TmeConfig& config = {});

struct RansacConfig {
  int num_candidates = 200;
  std::uint64_t seed = 0;
};

struct RansacFit {
  LinearSubspace subspace;
  double best_score = 0.0;
  int best_candidate = -1;
  /// LAD score of every drawn candidate; nullopt for rank-deficient draws.
  std::vector<std::optional<double>> scores;
};

/// Subset-sampling RANSAC: spans of random d-subsets scored by sum of distances.
RansacFit ransac_subspace(const DataSet& data, Eigen::Index d, const RansacConfig& config);

}  // namespace rsr
