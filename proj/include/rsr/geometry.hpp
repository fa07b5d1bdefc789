#pragma once

#include <Eigen/Dense>

namespace rsr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// A d-dimensional linear subspace of R^D, stored by an orthonormal D x d basis.
///
/// Instances are only produced by orthonormalize() (or by trusted internal code
/// that already holds an orthonormal basis), so the basis is always orthonormal
/// to working precision.
class LinearSubspace {
 public:
  LinearSubspace() = default;

  /// Wraps a basis that the caller guarantees is orthonormal. Use
  /// orthonormalize() for arbitrary spanning sets.
  static LinearSubspace from_orthonormal(Matrix basis);

  const Matrix& basis() const noexcept { return basis_; }
  Eigen::Index ambient_dim() const noexcept { return basis_.rows(); }
  Eigen::Index dim() const noexcept { return basis_.cols(); }

  /// P_L = U U^T
  Matrix projector() const;
  /// Q_L = I - P_L
  Matrix complement_projector() const;

  Vector project(const Eigen::Ref<const Vector>& x) const;
  /// Q_L x
  Vector residual(const Eigen::Ref<const Vector>& x) const;

  /// Image under an orthogonal map R (R^T R = I).
  LinearSubspace rotated(const Eigen::Ref<const Matrix>& rotation) const;

 private:
  explicit LinearSubspace(Matrix basis) : basis_(std::move(basis)) {}
  Matrix basis_;
};

/// Representative pair A = (L, m). Two pairs describe the same affine subspace
/// when their offsets differ by a vector in L.
struct AffineSubspace {
  LinearSubspace direction;
  Vector offset;

  Eigen::Index ambient_dim() const noexcept { return direction.ambient_dim(); }
  Eigen::Index dim() const noexcept { return direction.dim(); }
};

/// Principal angles between two equal-dimensional subspaces, sorted
/// nonincreasing (angles(0) is the largest), with matching principal vectors
/// in the columns of left / right.
struct PrincipalAngleDecomposition {
  Vector angles;
  Matrix left;
  Matrix right;
};

LinearSubspace orthonormalize(const Eigen::Ref<const Matrix>& raw);

double point_distance(const Eigen::Ref<const Vector>& x, const LinearSubspace& subspace);
double affine_point_distance(const Eigen::Ref<const Vector>& x, const AffineSubspace& affine);

PrincipalAngleDecomposition principal_angles(const LinearSubspace& first,
                                             const LinearSubspace& second);

/// ||P_L - P_{L*}||_2, i.e. the sine of the largest principal angle. Computed
/// from the complement residual so that tiny angles keep full relative accuracy.
double subspace_error(const LinearSubspace& estimate, const LinearSubspace& truth);

/// sqrt(sum_i theta_i(L, L')^2 + dist(m - m', L')^2). Not symmetric: it reads the
/// offset of the first argument as given and the second argument as a class.
double affine_rep_distance(const AffineSubspace& rep, const AffineSubspace& target);

}  // namespace rsr
