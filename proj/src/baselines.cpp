#include "rsr/baselines.hpp"

#include <cmath>
#include <numeric>

#include "rsr/error.hpp"
#include "rsr/kernels.hpp"
#include "rsr/rng.hpp"
#include "rsr/spectral.hpp"

namespace rsr {

namespace {

void require_rank(const Matrix& points, Eigen::Index d, const Vector& center, const char* where) {
  if (d < 1 || d >= points.rows()) {
    throw Error(ErrorKind::DimensionMismatch, std::string(where) + ": need 1 <= d < D");
  }
  if (numerical_rank(points, center) < d) {
    throw Error(ErrorKind::RankDeficient, std::string(where) + ": data span fewer than d dimensions");
  }
}

}  // namespace

PcaFit pca_subspace(const DataSet& data, Eigen::Index d, bool centered) {
  PcaFit fit;
  fit.mean = centered ? Vector(data.points().rowwise().mean()) : Vector::Zero(data.dim());
  require_rank(data.points(), d, centered ? fit.mean : Vector(), "pca_subspace");
  const Vector ones = Vector::Ones(data.size());
  const Matrix scatter = kernels::weighted_scatter(data.points(), ones, centered ? fit.mean : Vector());
  fit.subspace = top_eigenspace(scatter, d).subspace;
  return fit;
}

LinearSubspace spherical_pca_subspace(const DataSet& data, Eigen::Index d, std::vector<std::string>* warnings) {
  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    if (data.point(i).norm() >= 1e-12) kept.push_back(i);
  }
  if (kept.empty()) throw Error(ErrorKind::AllPointsDegenerate, "spherical_pca_subspace: all points are ~0");
  if (warnings != nullptr && static_cast<Eigen::Index>(kept.size()) < data.size()) {
    warnings->push_back("spherical_pca_subspace: skipped " +
                        std::to_string(data.size() - static_cast<Eigen::Index>(kept.size())) +
                        " near-zero points");
  }
  Matrix normalized(data.dim(), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t j = 0; j < kept.size(); ++j) {
    const auto x = data.point(kept[j]);
    normalized.col(static_cast<Eigen::Index>(j)) = x / x.norm();
  }
  return pca_subspace(DataSet(std::move(normalized)), d, false).subspace;
}

TmeFit tme_subspace(const DataSet& data, Eigen::Index d, const TmeConfig& config) {
  if (!(config.reg_eps > 0.0)) throw Error(ErrorKind::NonPositiveEpsilon, "tme_subspace: reg_eps must be > 0");
  if (config.max_iter < 1) throw Error(ErrorKind::ConfigInvalid, "tme_subspace: max_iter must be >= 1");
  if (d < 1 || d >= data.dim()) throw Error(ErrorKind::DimensionMismatch, "tme_subspace: need 1 <= d < D");
  const Eigen::Index dim = data.dim();
  const auto n = static_cast<double>(data.size());
  const auto dim_d = static_cast<double>(dim);
  const Matrix& x = data.points();

  auto normalize_trace = [dim_d](Matrix& m) { m *= dim_d / m.trace(); };

  TmeFit fit;
  Matrix shape = kernels::weighted_scatter(x, Vector::Ones(data.size())) / n;
  shape.diagonal().array() += config.reg_eps;
  normalize_trace(shape);

  for (int it = 0; it < config.max_iter; ++it) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(shape);
    const Vector& lambda = eig.eigenvalues();
    if (!(lambda(0) > 0.0) || lambda(dim - 1) / lambda(0) > 1e15) {
      throw Error(ErrorKind::SingularIterate, "tme_subspace: shape matrix condition exceeds 1e15");
    }
    // x^T Sigma^{-1} x = ||Lambda^{-1/2} V^T x||^2
    const Matrix whitened = lambda.cwiseSqrt().cwiseInverse().asDiagonal() * (eig.eigenvectors().transpose() * x);
    const Vector mahal = whitened.colwise().squaredNorm().transpose();
    const Vector w = (mahal.array() + config.reg_eps).inverse().matrix() * (dim_d / n);
    Matrix next = kernels::weighted_scatter(x, w);
    next.diagonal().array() += config.reg_eps;
    normalize_trace(next);
    const double change = (next - shape).norm() / shape.norm();
    shape = std::move(next);
    fit.iterations = it + 1;
    if (change < config.tol) break;
  }
  TopEigenspace top = top_eigenspace(shape, d);
  if (top.tie) fit.warnings.push_back("EigenvalueTie: TME shape matrix has tied eigenvalues at position d");
  fit.subspace = std::move(top.subspace);
  fit.shape = std::move(shape);
  return fit;
}

RansacFit ransac_subspace(const DataSet& data, Eigen::Index d, const RansacConfig& config) {
  if (config.num_candidates < 1) throw Error(ErrorKind::ConfigInvalid, "ransac: num_candidates must be >= 1");
  if (d < 1 || d > data.dim()) throw Error(ErrorKind::DimensionMismatch, "ransac: need 1 <= d <= D");
  if (data.size() < d) throw Error(ErrorKind::RankDeficient, "ransac: need n >= d");

  // Draw every subset up front so evaluation order cannot affect the result.
  const auto count = static_cast<std::size_t>(config.num_candidates);
  const auto n = static_cast<std::size_t>(data.size());
  const auto sub = static_cast<std::size_t>(d);
  CounterRng rng(config.seed);
  std::vector<std::vector<Eigen::Index>> subsets(count);
  std::vector<Eigen::Index> pool(n);
  for (auto& subset : subsets) {
    std::iota(pool.begin(), pool.end(), Eigen::Index{0});
    for (std::size_t j = 0; j < sub; ++j) {
      const std::size_t pick = j + static_cast<std::size_t>(rng.uniform() * static_cast<double>(n - j));
      std::swap(pool[j], pool[std::min(pick, n - 1)]);
    }
    subset.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(sub));
  }

  RansacFit fit;
  fit.scores.assign(count, std::nullopt);
  std::vector<std::optional<LinearSubspace>> spans(count);
  const auto candidates = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < candidates; ++c) {
    const auto& subset = subsets[static_cast<std::size_t>(c)];
    Matrix raw(data.dim(), d);
    for (Eigen::Index j = 0; j < d; ++j) raw.col(j) = data.point(subset[static_cast<std::size_t>(j)]);
    try {
      LinearSubspace span = orthonormalize(raw);
      fit.scores[static_cast<std::size_t>(c)] = kernels::serial::residual_norms(data.points(), span.basis(), {}).sum();
      spans[static_cast<std::size_t>(c)] = std::move(span);
    } catch (const Error&) {
      // rank-deficient draw; leave the score empty
    }
  }
  for (std::size_t c = 0; c < count; ++c) {
    if (fit.scores[c] && (fit.best_candidate < 0 || *fit.scores[c] < fit.best_score)) {
      fit.best_candidate = static_cast<int>(c);
      fit.best_score = *fit.scores[c];
    }
  }
  if (fit.best_candidate < 0) throw Error(ErrorKind::NoValidCandidate, "ransac: every draw was rank deficient");
  fit.subspace = *spans[static_cast<std::size_t>(fit.best_candidate)];
  return fit;
}

}  // namespace rsr
