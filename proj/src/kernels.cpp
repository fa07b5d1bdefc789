#include "rsr/kernels.hpp"

#include <cmath>
#include <vector>

namespace rsr::kernels {

namespace serial {

Vector residual_norms(const Matrix& points, const Matrix& basis, const Vector& center) {
  const Eigen::Index dim = points.rows();
  const Eigen::Index sub = basis.cols();
  const bool centered = center.size() != 0;
  Vector out(points.cols());
  Vector shifted(dim);
  Vector coeff(sub);
  for (Eigen::Index i = 0; i < points.cols(); ++i) {
    for (Eigen::Index r = 0; r < dim; ++r) {
      shifted(r) = centered ? points(r, i) - center(r) : points(r, i);
    }
    for (Eigen::Index j = 0; j < sub; ++j) {
      double acc = 0.0;
      for (Eigen::Index r = 0; r < dim; ++r) acc += basis(r, j) * shifted(r);
      coeff(j) = acc;
    }
    double sq = 0.0;
    for (Eigen::Index r = 0; r < dim; ++r) {
      double proj = 0.0;
      for (Eigen::Index j = 0; j < sub; ++j) proj += basis(r, j) * coeff(j);
      const double res = shifted(r) - proj;
      sq += res * res;
    }
    out(i) = std::sqrt(sq);
  }
  return out;
}

Matrix weighted_scatter(const Matrix& points, const Vector& weights, const Vector& center) {
  const Eigen::Index dim = points.rows();
  const bool centered = center.size() != 0;
  Matrix out = Matrix::Zero(dim, dim);
  Vector shifted(dim);
  for (Eigen::Index i = 0; i < points.cols(); ++i) {
    for (Eigen::Index r = 0; r < dim; ++r) {
      shifted(r) = centered ? points(r, i) - center(r) : points(r, i);
    }
    for (Eigen::Index b = 0; b < dim; ++b) {
      for (Eigen::Index a = b; a < dim; ++a) out(a, b) += weights(i) * shifted(a) * shifted(b);
    }
  }
  for (Eigen::Index b = 0; b < dim; ++b) {
    for (Eigen::Index a = b + 1; a < dim; ++a) out(b, a) = out(a, b);
  }
  return out;
}

Vector weighted_sum(const Matrix& points, const Vector& weights) {
  Vector out = Vector::Zero(points.rows());
  for (Eigen::Index i = 0; i < points.cols(); ++i) {
    for (Eigen::Index r = 0; r < points.rows(); ++r) out(r) += weights(i) * points(r, i);
  }
  return out;
}

}  // namespace serial

namespace parallel {

namespace {

Eigen::Index block_count(Eigen::Index n) { return (n + kBlockSize - 1) / kBlockSize; }

}  // namespace

Vector residual_norms(const Matrix& points, const Matrix& basis, const Vector& center) {
  const Eigen::Index n = points.cols();
  const Eigen::Index blocks = block_count(n);
  const bool centered = center.size() != 0;
  Vector out(n);
#pragma omp parallel for schedule(static) if (blocks > 1)
  for (Eigen::Index b = 0; b < blocks; ++b) {
    const Eigen::Index start = b * kBlockSize;
    const Eigen::Index len = std::min(kBlockSize, n - start);
    Matrix block = points.middleCols(start, len);
    if (centered) block.colwise() -= center;
    block.noalias() -= basis * (basis.transpose() * block);
    out.segment(start, len) = block.colwise().norm().transpose();
  }
  return out;
}

Matrix weighted_scatter(const Matrix& points, const Vector& weights, const Vector& center) {
  const Eigen::Index dim = points.rows();
  const Eigen::Index n = points.cols();
  const Eigen::Index blocks = block_count(n);
  const bool centered = center.size() != 0;
  std::vector<Matrix> partial(static_cast<std::size_t>(blocks));
#pragma omp parallel for schedule(static) if (blocks > 1)
  for (Eigen::Index b = 0; b < blocks; ++b) {
    const Eigen::Index start = b * kBlockSize;
    const Eigen::Index len = std::min(kBlockSize, n - start);
    Matrix block = points.middleCols(start, len);
    if (centered) block.colwise() -= center;
    Matrix weighted = block * weights.segment(start, len).asDiagonal();
    Matrix local = Matrix::Zero(dim, dim);
    local.triangularView<Eigen::Lower>() = weighted * block.transpose();
    partial[static_cast<std::size_t>(b)] = std::move(local);
  }
  Matrix out = Matrix::Zero(dim, dim);
  for (const Matrix& p : partial) out.triangularView<Eigen::Lower>() += p;
  out.triangularView<Eigen::StrictlyUpper>() = out.transpose();
  return out;
}

Vector weighted_sum(const Matrix& points, const Vector& weights) {
  const Eigen::Index n = points.cols();
  const Eigen::Index blocks = block_count(n);
  std::vector<Vector> partial(static_cast<std::size_t>(blocks));
#pragma omp parallel for schedule(static) if (blocks > 1)
  for (Eigen::Index b = 0; b < blocks; ++b) {
    const Eigen::Index start = b * kBlockSize;
    const Eigen::Index len = std::min(kBlockSize, n - start);
    partial[static_cast<std::size_t>(b)] = points.middleCols(start, len) * weights.segment(start, len);
  }
  Vector out = Vector::Zero(points.rows());
  for (const Vector& p : partial) out += p;
  return out;
}

}  // namespace parallel

}  // namespace rsr::kernels
