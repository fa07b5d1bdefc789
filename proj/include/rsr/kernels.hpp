#pragma once

#include <Eigen/Dense>

// Point-wise kernels behind the objective and solver code. Two implementations
// share one contract:
//
//   serial::   straightforward per-point loops; the reference the tests and the
//              benchmark compare against.
//   parallel:: OpenMP over fixed blocks of kBlockSize points. Partial results are
//              reduced in block order, so output is bitwise identical for any
//              thread count (though not bitwise equal to serial::).
//
// The unqualified functions in rsr::kernels forward to parallel::.

namespace rsr::kernels {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr Eigen::Index kBlockSize = 256;

namespace serial {
/// out(i) = ||Q_W (x_i - center)||; center may be empty (treated as 0).
Vector residual_norms(const Matrix& points, const Matrix& basis, const Vector& center);
/// sum_i w_i (x_i - c)(x_i - c)^T; center may be empty.
Matrix weighted_scatter(const Matrix& points, const Vector& weights, const Vector& center);
/// sum_i w_i x_i
Vector weighted_sum(const Matrix& points, const Vector& weights);
}  // namespace serial

namespace parallel {
Vector residual_norms(const Matrix& points, const Matrix& basis, const Vector& center);
Matrix weighted_scatter(const Matrix& points, const Vector& weights, const Vector& center);
Vector weighted_sum(const Matrix& points, const Vector& weights);
}  // namespace parallel

inline Vector residual_norms(const Matrix& points, const Matrix& basis, const Vector& center = {}) {
  return parallel::residual_norms(points, basis, center);
}
inline Matrix weighted_scatter(const Matrix& points, const Vector& weights, const Vector& center = {}) {
  return parallel::weighted_scatter(points, weights, center);
}
inline Vector weighted_sum(const Matrix& points, const Vector& weights) {
  return parallel::weighted_sum(points, weights);
}

}  // namespace rsr::kernels
