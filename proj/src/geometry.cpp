#include "rsr/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rsr/error.hpp"

namespace rsr {

namespace {

constexpr double kRankTolerance = 1e-12;

void require_same_shape(const LinearSubspace& a, const LinearSubspace& b, const char* where) {
  if (a.ambient_dim() != b.ambient_dim() || a.dim() != b.dim()) {
    throw Error(ErrorKind::DimensionMismatch,
                std::string(where) + ": subspaces of shape " + std::to_string(a.ambient_dim()) +
                    "x" + std::to_string(a.dim()) + " and " + std::to_string(b.ambient_dim()) +
                    "x" + std::to_string(b.dim()));
  }
}

void require_ambient(Eigen::Index point_dim, Eigen::Index ambient, const char* where) {
  if (point_dim != ambient) {
    throw Error(ErrorKind::DimensionMismatch,
                std::string(where) + ": point has " + std::to_string(point_dim) +
                    " coordinates, subspace lives in R^" + std::to_string(ambient));
  }
}

}  // namespace

LinearSubspace LinearSubspace::from_orthonormal(Matrix basis) { return LinearSubspace(std::move(basis)); }

Matrix LinearSubspace::projector() const { return basis_ * basis_.transpose(); }

Matrix LinearSubspace::complement_projector() const {
  Matrix q = -projector();
  q.diagonal().array() += 1.0;
  return q;
}

Vector LinearSubspace::project(const Eigen::Ref<const Vector>& x) const {
  return basis_ * (basis_.transpose() * x);
}

Vector LinearSubspace::residual(const Eigen::Ref<const Vector>& x) const {
  return x - basis_ * (basis_.transpose() * x);
}

LinearSubspace LinearSubspace::rotated(const Eigen::Ref<const Matrix>& rotation) const {
  if (rotation.rows() != ambient_dim() || rotation.cols() != ambient_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "rotated: rotation has wrong shape");
  }
  return LinearSubspace(rotation * basis_);
}

LinearSubspace orthonormalize(const Eigen::Ref<const Matrix>& raw) {
  if (raw.cols() == 0 || raw.rows() == 0 || raw.cols() > raw.rows()) {
    throw Error(ErrorKind::RankDeficient,
                "orthonormalize: need 1 <= d <= D columns, got " + std::to_string(raw.cols()));
  }
  Eigen::JacobiSVD<Matrix> svd(raw, Eigen::ComputeThinU);
  const Vector& sv = svd.singularValues();
  if (!(sv(0) > 0.0) || sv(sv.size() - 1) <= kRankTolerance * sv(0)) {
    throw Error(ErrorKind::RankDeficient, "orthonormalize: columns are (numerically) dependent");
  }
  return LinearSubspace::from_orthonormal(svd.matrixU());
}

double point_distance(const Eigen::Ref<const Vector>& x, const LinearSubspace& subspace) {
  require_ambient(x.size(), subspace.ambient_dim(), "point_distance");
  return subspace.residual(x).norm();
}

double affine_point_distance(const Eigen::Ref<const Vector>& x, const AffineSubspace& affine) {
  require_ambient(x.size(), affine.ambient_dim(), "affine_point_distance");
  require_ambient(affine.offset.size(), affine.ambient_dim(), "affine_point_distance");
  return affine.direction.residual(x - affine.offset).norm();
}

PrincipalAngleDecomposition principal_angles(const LinearSubspace& first,
                                             const LinearSubspace& second) {
  require_same_shape(first, second, "principal_angles");
  const Matrix& w0 = first.basis();
  const Matrix& w1 = second.basis();
  const Eigen::Index d = first.dim();

  // Cosines come from W0^T W1 = R0 cos(Theta) R1^T. Sines come from the part of
  // W1 outside L0; they resolve small angles that arccos would flatten to 0.
  const Matrix cross = w0.transpose() * w1;
  Eigen::JacobiSVD<Matrix> cos_svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Matrix outside = w1 - w0 * cross;
  Eigen::JacobiSVD<Matrix> sin_svd(outside);

  // cos_svd orders cosines descending (smallest angle first); flip it.
  const Vector& cosines = cos_svd.singularValues();
  const Vector& sines = sin_svd.singularValues();
  PrincipalAngleDecomposition out;
  out.angles.resize(d);
  out.left.resize(w0.rows(), d);
  out.right.resize(w1.rows(), d);
  const Matrix u_all = w0 * cos_svd.matrixU();
  const Matrix v_all = w1 * cos_svd.matrixV();
  for (Eigen::Index j = 0; j < d; ++j) {
    const Eigen::Index src = d - 1 - j;
    const double c = std::clamp(cosines(src), 0.0, 1.0);
    const double s = std::clamp(sines(j), 0.0, 1.0);
    out.angles(j) = (s * s < 0.5) ? std::asin(s) : std::acos(c);
    out.left.col(j) = u_all.col(src);
    out.right.col(j) = v_all.col(src);
  }
  // Mixing the two branches can leave a one-ulp inversion at pi/4.
  for (Eigen::Index j = 1; j < d; ++j) {
    out.angles(j) = std::min(out.angles(j), out.angles(j - 1));
  }
  return out;
}

double subspace_error(const LinearSubspace& estimate, const LinearSubspace& truth) {
  require_same_shape(estimate, truth, "subspace_error");
  const Matrix outside = estimate.basis() - truth.basis() * (truth.basis().transpose() * estimate.basis());
  Eigen::JacobiSVD<Matrix> svd(outside);
  return std::min(1.0, svd.singularValues()(0));
}

double affine_rep_distance(const AffineSubspace& rep, const AffineSubspace& target) {
  require_same_shape(rep.direction, target.direction, "affine_rep_distance");
  require_ambient(rep.offset.size(), rep.ambient_dim(), "affine_rep_distance");
  require_ambient(target.offset.size(), target.ambient_dim(), "affine_rep_distance");
  const Vector angles = principal_angles(rep.direction, target.direction).angles;
  const double offset_gap = target.direction.residual(rep.offset - target.offset).norm();
  return std::sqrt(angles.squaredNorm() + offset_gap * offset_gap);
}

}  // namespace rsr
