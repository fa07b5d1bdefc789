#pragma once

#include "rsr/geometry.hpp"

namespace rsr {

struct TopEigenspace {
  LinearSubspace subspace;
  Vector eigenvalues;  // all D eigenvalues, descending
  bool tie = false;    // lambda_d - lambda_{d+1} < 1e-12 lambda_1
};

/// Span of the top-d eigenvectors of a symmetric matrix (lower triangle read).
/// The matrix is rescaled by its largest entry first, so the eigenspace is
/// unaffected by huge IRLS weights. Ordering follows Eigen's self-adjoint solver
/// and is deterministic.
TopEigenspace top_eigenspace(const Matrix& symmetric, Eigen::Index d);

/// Top-d eigenspace of S = sum_i w_i (x_i - c)(x_i - c)^T computed from an SVD
/// of the factor rows sqrt(w_i) (x_i - c)^T, so S is never formed. Rows are
/// sorted by weighted norm before a QR-preconditioned Jacobi SVD, which keeps the
/// small eigenvalues of S relatively accurate when the weights span many orders
/// of magnitude. Eigenvalues beyond min(n, D) are zero.
TopEigenspace weighted_top_eigenspace(const Matrix& points, const Vector& weights, Eigen::Index d,
                                      const Vector& center = {});

/// Numerical rank of the columns of points (optionally after subtracting
/// center): singular values <= 1e-12 sigma_1 count as zero.
Eigen::Index numerical_rank(const Matrix& points, const Vector& center = {});

/// Spectral norm of a symmetric PSD matrix.
double spectral_norm_psd(const Matrix& symmetric);

}  // namespace rsr
