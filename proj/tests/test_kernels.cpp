#include <doctest.h>

#include <omp.h>

#include <cmath>

#include "rsr/error.hpp"
#include "rsr/kernels.hpp"
#include "rsr/rng.hpp"
#include "rsr/spectral.hpp"
#include "test_support.hpp"

using namespace rsr;
using rsr::testing::log_uniform;
using rsr::testing::uniform_int;

namespace {

// Sizes straddling the block boundary, including a single partial block.
const Eigen::Index kSizes[] = {1, 7, 255, 256, 257, 1000, 2049};

double rel_diff(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff() / (1.0 + b.cwiseAbs().maxCoeff());
}

template <typename F>
auto with_threads(int threads, F&& f) {
  const int saved = omp_get_max_threads();
  omp_set_num_threads(threads);
  auto out = f();
  omp_set_num_threads(saved);
  return out;
}

}  // namespace

TEST_CASE("parallel kernels agree with the serial reference") {
  CounterRng rng(31);
  for (Eigen::Index n : kSizes) {
    const Eigen::Index dim = uniform_int(rng, 2, 12);
    const Matrix x = gaussian_matrix(rng, dim, n);
    const Matrix basis = random_subspace(rng, dim, uniform_int(rng, 1, dim - 1)).basis();
    const Vector center = gaussian_matrix(rng, dim, 1).col(0);
    Vector w(n);
    for (Eigen::Index i = 0; i < n; ++i) w(i) = log_uniform(rng, 1e-3, 1e3);

    CHECK(rel_diff(kernels::parallel::residual_norms(x, basis, {}), kernels::serial::residual_norms(x, basis, {})) <
          1e-13);
    CHECK(rel_diff(kernels::parallel::residual_norms(x, basis, center),
                   kernels::serial::residual_norms(x, basis, center)) < 1e-13);
    CHECK(rel_diff(kernels::parallel::weighted_scatter(x, w, {}), kernels::serial::weighted_scatter(x, w, {})) <
          1e-13);
    CHECK(rel_diff(kernels::parallel::weighted_scatter(x, w, center),
                   kernels::serial::weighted_scatter(x, w, center)) < 1e-13);
    CHECK(rel_diff(kernels::parallel::weighted_sum(x, w), kernels::serial::weighted_sum(x, w)) < 1e-13);
  }
}

TEST_CASE("serial kernels agree with direct formulas") {
  CounterRng rng(32);
  const Matrix x = gaussian_matrix(rng, 5, 40);
  const Matrix basis = random_subspace(rng, 5, 2).basis();
  const Vector w = gaussian_matrix(rng, 40, 1).col(0).cwiseAbs();
  const Vector r = kernels::serial::residual_norms(x, basis, {});
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    CHECK(std::abs(r(i) - (x.col(i) - basis * (basis.transpose() * x.col(i))).norm()) < 1e-13);
  }
  CHECK(rel_diff(kernels::serial::weighted_scatter(x, w, {}), x * w.asDiagonal() * x.transpose()) < 1e-13);
  CHECK(rel_diff(kernels::serial::weighted_sum(x, w), x * w) < 1e-13);
}

TEST_CASE("parallel kernels are bitwise identical across thread counts") {
  CounterRng rng(33);
  const Matrix x = gaussian_matrix(rng, 9, 3001);
  const Matrix basis = random_subspace(rng, 9, 3).basis();
  const Vector w = gaussian_matrix(rng, 3001, 1).col(0).cwiseAbs();
  const Vector center = gaussian_matrix(rng, 9, 1).col(0);
  const auto run = [&] {
    return std::make_tuple(kernels::residual_norms(x, basis, center), kernels::weighted_scatter(x, w, center),
                           kernels::weighted_sum(x, w));
  };
  const auto one = with_threads(1, run);
  for (int threads : {2, 3, 8}) {
    const auto many = with_threads(threads, run);
    CHECK(std::get<0>(one) == std::get<0>(many));
    CHECK(std::get<1>(one) == std::get<1>(many));
    CHECK(std::get<2>(one) == std::get<2>(many));
  }
}

TEST_CASE("weighted scatter is exactly symmetric") {
  CounterRng rng(34);
  const Matrix x = gaussian_matrix(rng, 7, 600);
  const Vector w = gaussian_matrix(rng, 600, 1).col(0).cwiseAbs();
  const Matrix s = kernels::weighted_scatter(x, w);
  CHECK(s == s.transpose());
}

TEST_CASE("top_eigenspace matches a dense oracle") {
  CounterRng rng(35);
  for (int i = 0; i < 100; ++i) {
    const Eigen::Index dim = uniform_int(rng, 2, 15);
    const Eigen::Index d = uniform_int(rng, 1, dim - 1);
    const Matrix s = rsr::testing::random_psd(rng, dim);
    const TopEigenspace top = top_eigenspace(s, d);
    CHECK(subspace_error(top.subspace, rsr::testing::dense_top_eigenspace(s, d)) < 1e-8);
    for (Eigen::Index j = 1; j < dim; ++j) CHECK(top.eigenvalues(j) <= top.eigenvalues(j - 1));
  }
  CHECK_THROWS_AS(top_eigenspace(Matrix::Zero(3, 3), 1), Error);
  CHECK_THROWS_AS(top_eigenspace(Matrix::Identity(3, 3), 4), Error);
}

TEST_CASE("top_eigenspace flags ties") {
  Matrix s = Matrix::Zero(3, 3);
  s.diagonal() << 2.0, 1.0, 1.0;
  CHECK(top_eigenspace(s, 2).tie);
  CHECK_FALSE(top_eigenspace(s, 1).tie);
}

TEST_CASE("weighted_top_eigenspace matches the eigenspace of the formed scatter") {
  CounterRng rng(36);
  for (int i = 0; i < 100; ++i) {
    const Eigen::Index dim = uniform_int(rng, 2, 10);
    const Eigen::Index d = uniform_int(rng, 1, dim - 1);
    const Eigen::Index n = uniform_int(rng, 1, 80);
    const Matrix x = gaussian_matrix(rng, dim, n);
    Vector w(n);
    for (Eigen::Index j = 0; j < n; ++j) w(j) = log_uniform(rng, 1e-2, 1e2);
    const Vector center = i % 2 == 0 ? Vector() : Vector(gaussian_matrix(rng, dim, 1).col(0));
    const Matrix s = kernels::serial::weighted_scatter(x, w, center);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(s);
    const Vector lam = eig.eigenvalues().reverse();
    // Only compare where the eigenspace is well separated.
    const double gap = d < std::min(n, dim) ? lam(d - 1) - lam(d) : lam(d - 1);
    if (d > std::min(n, dim) || gap < 1e-6 * lam(0)) continue;
    const TopEigenspace top = weighted_top_eigenspace(x, w, d, center);
    CHECK(subspace_error(top.subspace, rsr::testing::dense_top_eigenspace(s, d)) < 1e-8);
    CHECK(std::abs(top.eigenvalues(0) - lam(0)) < 1e-10 * lam(0));
    CHECK((top.subspace.basis().transpose() * top.subspace.basis() - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() <
          1e-12);
  }
}

TEST_CASE("weighted_top_eigenspace resolves weights far below the largest") {
  // Two heavy points along e1 and light points spanning e2 and e3 with a clear
  // preference for e2. Forming the scatter would lose the light part entirely.
  Matrix x(3, 4);
  x << 1, -1, 0, 0,
       0, 0, 2, 0,
       0, 0, 0, 1;
  Vector w(4);
  w << 1.0, 1.0, 1e-200, 1e-200;
  const TopEigenspace top = weighted_top_eigenspace(x, w, 2);
  Matrix expected = Matrix::Zero(3, 2);
  expected(0, 0) = 1.0;
  expected(1, 1) = 1.0;
  CHECK(subspace_error(top.subspace, LinearSubspace::from_orthonormal(expected)) < 1e-14);
  // Measured against lambda_1 the gap is negligible, so the tie flag is raised.
  CHECK(top.tie);
}

TEST_CASE("weighted_top_eigenspace errors") {
  const Matrix x = Matrix::Identity(3, 3);
  CHECK_THROWS_AS(weighted_top_eigenspace(x, Vector::Zero(3), 1), Error);
  CHECK_THROWS_AS(weighted_top_eigenspace(x, Vector::Ones(2), 1), Error);
  Vector one_point = Vector::Zero(3);
  one_point(0) = 1.0;
  CHECK_THROWS_AS(weighted_top_eigenspace(x, one_point, 2), Error);
}

TEST_CASE("numerical_rank") {
  CounterRng rng(37);
  const Matrix low = gaussian_matrix(rng, 6, 2) * gaussian_matrix(rng, 2, 30);
  CHECK(numerical_rank(low) == 2);
  CHECK(numerical_rank(gaussian_matrix(rng, 4, 30)) == 4);
  Matrix line = gaussian_matrix(rng, 3, 1) * gaussian_matrix(rng, 1, 10);
  const Vector shift = gaussian_matrix(rng, 3, 1).col(0);
  line.colwise() += shift;
  CHECK(numerical_rank(line, shift) == 1);
}
