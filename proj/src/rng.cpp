#include "rsr/rng.hpp"

#include <random>

namespace rsr {

Matrix gaussian_matrix(CounterRng& rng, Eigen::Index rows, Eigen::Index cols, double stddev) {
  std::normal_distribution<double> normal(0.0, stddev);
  Matrix out(rows, cols);
  // Column-major fill so a prefix of columns does not depend on cols.
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) out(i, j) = normal(rng);
  }
  return out;
}

LinearSubspace random_subspace(CounterRng& rng, Eigen::Index ambient, Eigen::Index d) {
  return orthonormalize(gaussian_matrix(rng, ambient, d));
}

Matrix random_orthogonal(CounterRng& rng, Eigen::Index ambient) {
  const Matrix g = gaussian_matrix(rng, ambient, ambient);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  // Sign-fix by diag(R) so the distribution is Haar rather than QR-biased.
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < ambient; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

}  // namespace rsr
