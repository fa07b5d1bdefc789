#include "rsr/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "rsr/error.hpp"

namespace rsr {

TopEigenspace top_eigenspace(const Matrix& symmetric, Eigen::Index d) {
  const Eigen::Index dim = symmetric.rows();
  if (symmetric.cols() != dim || d < 1 || d > dim) {
    throw Error(ErrorKind::DimensionMismatch,
                "top_eigenspace: cannot take " + std::to_string(d) + " eigenvectors of a " +
                    std::to_string(symmetric.rows()) + "x" + std::to_string(symmetric.cols()) +
                    " matrix");
  }
  const double scale = symmetric.cwiseAbs().maxCoeff();
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw Error(ErrorKind::RankDeficient, "top_eigenspace: matrix is zero or not finite");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetric / scale);
  const Vector& ascending = solver.eigenvalues();
  TopEigenspace out;
  out.eigenvalues = ascending.reverse() * scale;
  out.subspace = LinearSubspace::from_orthonormal(solver.eigenvectors().rightCols(d).rowwise().reverse());
  if (d < dim) {
    const double lead = out.eigenvalues(0);
    out.tie = out.eigenvalues(d - 1) - out.eigenvalues(d) < 1e-12 * lead;
  }
  return out;
}

namespace {

// Orthogonalizes the columns of a in place by plane rotations and returns their
// norms. Convergence is tested on the cosine between column pairs, so tiny
// columns are resolved as accurately as large ones.
Vector one_sided_jacobi(Matrix& a) {
  const Eigen::Index m = a.cols();
  const double tol = 4.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(a.rows());
  for (int sweep = 0; sweep < 80; ++sweep) {
    bool rotated = false;
    for (Eigen::Index p = 0; p + 1 < m; ++p) {
      for (Eigen::Index q = p + 1; q < m; ++q) {
        const double np = a.col(p).stableNorm();
        const double nq = a.col(q).stableNorm();
        if (np == 0.0 || nq == 0.0) continue;
        const double cosine = (a.col(p) / np).dot(a.col(q) / nq);
        if (std::abs(cosine) <= tol) continue;
        const double ratio = nq / np;
        const double zeta = (ratio - 1.0 / ratio) / (2.0 * cosine);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        if (!std::isfinite(t) || t == 0.0) continue;
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        const Vector ap = a.col(p);
        a.col(p) = c * ap - s * a.col(q);
        a.col(q) = s * ap + c * a.col(q);
        rotated = true;
      }
    }
    if (!rotated) break;
  }
  Vector norms(m);
  for (Eigen::Index j = 0; j < m; ++j) norms(j) = a.col(j).stableNorm();
  return norms;
}

}  // namespace

TopEigenspace weighted_top_eigenspace(const Matrix& points, const Vector& weights, Eigen::Index d,
                                      const Vector& center) {
  const Eigen::Index dim = points.rows();
  const Eigen::Index n = points.cols();
  if (weights.size() != n || d < 1 || d > dim || (center.size() != 0 && center.size() != dim)) {
    throw Error(ErrorKind::DimensionMismatch, "weighted_top_eigenspace: inconsistent shapes");
  }
  Matrix rows(n, dim);
  Vector mass(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(weights(i) >= 0.0) || !std::isfinite(weights(i))) {
      throw Error(ErrorKind::RankDeficient, "weighted_top_eigenspace: weights must be finite and >= 0");
    }
    rows.row(i) = points.col(i).transpose();
    if (center.size() != 0) rows.row(i) -= center.transpose();
    rows.row(i) *= std::sqrt(weights(i));
    mass(i) = rows.row(i).squaredNorm();
  }
  const double top = mass.size() > 0 ? mass.maxCoeff() : 0.0;
  if (!(top > 0.0) || !std::isfinite(top)) {
    throw Error(ErrorKind::RankDeficient, "weighted_top_eigenspace: all weighted points are zero");
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return mass(a) > mass(b); });
  const double root = std::sqrt(top);
  Matrix sorted(n, dim);
  for (Eigen::Index i = 0; i < n; ++i) sorted.row(i) = rows.row(order[static_cast<std::size_t>(i)]) / root;

  // Y P = Q R; the right singular vectors of R are the left singular vectors
  // of R^T, which one-sided Jacobi produces with relative accuracy even when
  // the rows of R are graded over hundreds of orders of magnitude.
  Matrix padded = Matrix::Zero(std::max(n, dim), dim);
  padded.topRows(n) = sorted;
  const Eigen::ColPivHouseholderQR<Matrix> qr(padded);
  Matrix cols = qr.matrixR().topRows(dim).triangularView<Eigen::Upper>().toDenseMatrix().transpose();
  Vector sv = one_sided_jacobi(cols);
  Matrix v = Matrix::Zero(dim, dim);
  std::vector<Eigen::Index> rank_order(static_cast<std::size_t>(dim));
  std::iota(rank_order.begin(), rank_order.end(), Eigen::Index{0});
  std::stable_sort(rank_order.begin(), rank_order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return sv(a) > sv(b); });
  Vector sorted_sv(dim);
  const Matrix perm = qr.colsPermutation();
  for (Eigen::Index j = 0; j < dim; ++j) {
    const Eigen::Index src = rank_order[static_cast<std::size_t>(j)];
    sorted_sv(j) = sv(src);
    if (sv(src) > 0.0) v.col(j) = perm * (cols.col(src) / cols.col(src).stableNorm());
  }
  sv = sorted_sv;
  // Columns with zero singular value carry no direction; fill them from the
  // orthogonal complement of the rest.
  const Eigen::Index live = (sv.array() > 0.0).count();
  if (live < dim) {
    Eigen::JacobiSVD<Matrix> full(v.leftCols(live).transpose(), Eigen::ComputeFullV);
    v.rightCols(dim - live) = full.matrixV().rightCols(dim - live);
  }
  TopEigenspace out;
  out.eigenvalues = (sv * root).array().square().matrix();
  if (!(sv(d - 1) > 0.0)) {
    throw Error(ErrorKind::RankDeficient, "weighted_top_eigenspace: weighted scatter has rank below d");
  }
  out.subspace = LinearSubspace::from_orthonormal(v.leftCols(d));
  if (d < dim) {
    // Compared as ratios so underflowing eigenvalues still give a verdict.
    const double hi = sv(d - 1) / sv(0);
    const double lo = sv(d) / sv(0);
    out.tie = hi * hi - lo * lo < 1e-12;
  }
  return out;
}

Eigen::Index numerical_rank(const Matrix& points, const Vector& center) {
  if (points.size() == 0) return 0;
  Matrix shifted = points;
  if (center.size() != 0) shifted.colwise() -= center;
  // The rank of a wide D x n matrix equals that of its D x D Gram factor; an SVD
  // of the transpose keeps small singular values accurate.
  Eigen::BDCSVD<Matrix> svd(shifted.transpose());
  const Vector& sv = svd.singularValues();
  if (!(sv(0) > 0.0)) return 0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > 1e-12 * sv(0)) ++rank;
  }
  return rank;
}

double spectral_norm_psd(const Matrix& symmetric) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetric, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace rsr
