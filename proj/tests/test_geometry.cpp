#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rsr/error.hpp"
#include "rsr/geometry.hpp"
#include "rsr/rng.hpp"
#include "test_support.hpp"

using namespace rsr;
using rsr::testing::uniform_int;

namespace {

Matrix cols(std::initializer_list<std::initializer_list<double>> columns) {
  const auto n = static_cast<Eigen::Index>(columns.size());
  const auto dim = static_cast<Eigen::Index>(columns.begin()->size());
  Matrix m(dim, n);
  Eigen::Index j = 0;
  for (const auto& c : columns) {
    Eigen::Index i = 0;
    for (double v : c) m(i++, j) = v;
    ++j;
  }
  return m;
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

LinearSubspace span(std::initializer_list<std::initializer_list<double>> columns) {
  return orthonormalize(cols(columns));
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an rsr::Error");
  return ErrorKind::IoError;
}

// Largest and smallest of ||M a|| over unit a in R^2 by a dense angle grid,
// refined around the best grid cell.
std::pair<double, double> grid_singular_values(const Matrix& m) {
  auto value = [&](double t) { return (m * vec({std::cos(t), std::sin(t)})).norm(); };
  const int steps = 20000;
  const double h = std::numbers::pi / steps;
  int arg_hi = 0, arg_lo = 0;
  for (int i = 1; i < steps; ++i) {
    if (value(i * h) > value(arg_hi * h)) arg_hi = i;
    if (value(i * h) < value(arg_lo * h)) arg_lo = i;
  }
  auto refine = [&](int centre, bool maximize) {
    double lo = (centre - 1) * h, hi = (centre + 1) * h;
    for (int it = 0; it < 200; ++it) {
      const double a = lo + (hi - lo) / 3, b = hi - (hi - lo) / 3;
      const bool keep_left = maximize ? value(a) > value(b) : value(a) < value(b);
      (keep_left ? hi : lo) = keep_left ? b : a;
    }
    return value(0.5 * (lo + hi));
  };
  return {refine(arg_hi, true), refine(arg_lo, false)};
}

}  // namespace

TEST_CASE("orthonormalize examples") {
  const LinearSubspace plane = orthonormalize(cols({{2, 0}, {0, 3}}));
  CHECK(plane.dim() == 2);
  CHECK((plane.basis().transpose() * plane.basis() - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((plane.projector() - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);

  const LinearSubspace line = orthonormalize(cols({{1, 1, 0}}));
  const Vector expected = vec({1, 1, 0}) / std::sqrt(2.0);
  CHECK(std::abs(std::abs(line.basis().col(0).dot(expected)) - 1.0) < 1e-12);

  CHECK(kind_of([] { orthonormalize(cols({{1, 0}, {1, 1e-15}})); }) == ErrorKind::RankDeficient);
}

TEST_CASE("orthonormal basis and projector invariants on random inputs") {
  CounterRng rng(11);
  for (int i = 0; i < 100; ++i) {
    const Eigen::Index dim = uniform_int(rng, 2, 12);
    const Eigen::Index d = uniform_int(rng, 1, dim);
    const Matrix raw = gaussian_matrix(rng, dim, d);
    const LinearSubspace l = orthonormalize(raw);
    CHECK((l.basis().transpose() * l.basis() - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-12);
    const Matrix p = l.projector();
    CHECK((p - p.transpose()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((p * p - p).cwiseAbs().maxCoeff() < 1e-10);
    // Span preserved: every raw column is left unchanged by the projector.
    CHECK((p * raw - raw).cwiseAbs().maxCoeff() < 1e-10 * (1.0 + raw.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("point_distance examples") {
  CHECK(point_distance(vec({3, 0, 4}), span({{1, 0, 0}, {0, 1, 0}})) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(point_distance(vec({2, 5, 0}), span({{1, 0, 0}, {0, 1, 0}})) < 1e-14);
  CHECK(point_distance(vec({1, 1}), span({{1, 0}})) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(kind_of([] { point_distance(vec({1, 1, 1}), span({{1, 0}})); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("affine_point_distance examples and representative invariance") {
  const AffineSubspace origin_line{span({{1, 0}}), vec({0, 0})};
  CHECK(affine_point_distance(vec({5, 1}), origin_line) == doctest::Approx(1.0).epsilon(1e-14));
  const AffineSubspace shifted_line{span({{1, 0}}), vec({99, 1})};
  CHECK(affine_point_distance(vec({5, 1}), shifted_line) < 1e-14);

  CounterRng rng(12);
  const LinearSubspace l = random_subspace(rng, 6, 2);
  const AffineSubspace a{l, gaussian_matrix(rng, 6, 1).col(0)};
  const Vector x = gaussian_matrix(rng, 6, 1, 2.0).col(0);
  const double base = affine_point_distance(x, a);
  for (int i = 0; i < 100; ++i) {
    const Vector delta = gaussian_matrix(rng, 6, 1, 10.0).col(0);
    const AffineSubspace moved{l, a.offset + l.project(delta)};
    CHECK(std::abs(affine_point_distance(x, moved) - base) < 1e-12);
  }
  CHECK(kind_of([&] { affine_point_distance(vec({1, 2}), a); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("principal_angles examples") {
  CounterRng rng(13);
  const LinearSubspace l = random_subspace(rng, 5, 3);
  const PrincipalAngleDecomposition same = principal_angles(l, l);
  CHECK(same.angles.cwiseAbs().maxCoeff() < 1e-12);

  const PrincipalAngleDecomposition quarter = principal_angles(span({{1, 0}}), span({{1, 1}}));
  CHECK(quarter.angles(0) == doctest::Approx(std::numbers::pi / 4).epsilon(1e-14));

  CHECK(kind_of([&] { principal_angles(l, random_subspace(rng, 5, 2)); }) == ErrorKind::DimensionMismatch);
  CHECK(kind_of([&] { principal_angles(l, random_subspace(rng, 6, 3)); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("principal angles agree with a grid-search optimization in R^5") {
  CounterRng rng(14);
  for (int i = 0; i < 10; ++i) {
    const LinearSubspace a = random_subspace(rng, 5, 2);
    const LinearSubspace b = random_subspace(rng, 5, 2);
    const PrincipalAngleDecomposition pa = principal_angles(a, b);
    // max_a max_b (A a)^T (B b) = max_a ||B^T A a||; the min over a gives the
    // cosine of the largest angle.
    const auto [cos_small, cos_large] = grid_singular_values(b.basis().transpose() * a.basis());
    CHECK(std::abs(pa.angles(0) - std::acos(std::min(1.0, cos_large))) < 1e-6);
    CHECK(std::abs(pa.angles(1) - std::acos(std::min(1.0, cos_small))) < 1e-6);
  }
}

TEST_CASE("principal vector invariants") {
  CounterRng rng(15);
  for (int i = 0; i < 100; ++i) {
    const Eigen::Index dim = uniform_int(rng, 2, 10);
    const Eigen::Index d = uniform_int(rng, 1, dim);
    const LinearSubspace a = random_subspace(rng, dim, d);
    const LinearSubspace b = random_subspace(rng, dim, d);
    const PrincipalAngleDecomposition pa = principal_angles(a, b);
    for (Eigen::Index j = 0; j < d; ++j) {
      CHECK(pa.angles(j) >= 0.0);
      CHECK(pa.angles(j) <= std::numbers::pi / 2 + 1e-15);
      if (j > 0) CHECK(pa.angles(j) <= pa.angles(j - 1));
      CHECK(std::abs(std::cos(pa.angles(j)) - pa.left.col(j).dot(pa.right.col(j))) < 1e-10);
    }
    CHECK((pa.left.transpose() * pa.left - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((pa.right.transpose() * pa.right - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(std::sin(pa.angles(0)) - subspace_error(a, b)) < 1e-10);
  }
}

TEST_CASE("subspace_error examples") {
  CounterRng rng(16);
  const LinearSubspace l = random_subspace(rng, 7, 3);
  CHECK(subspace_error(l, l) < 1e-14);
  CHECK(subspace_error(span({{1, 0}}), span({{0, 1}})) == doctest::Approx(1.0).epsilon(1e-14));

  // theta_1 = pi/6: rotate one axis of a 2-plane in R^4 toward a third axis;
  // the oracle is the spectral norm of the projector difference.
  const double t = std::numbers::pi / 6;
  const LinearSubspace base = span({{1, 0, 0, 0}, {0, 1, 0, 0}});
  const LinearSubspace tilted = span({{1, 0, 0, 0}, {0, std::cos(t), std::sin(t), 0}});
  CHECK(std::abs(subspace_error(tilted, base) - 0.5) < 1e-12);
  CHECK(std::abs(rsr::testing::sym_spectral_norm(tilted.projector() - base.projector()) - 0.5) < 1e-12);

  CHECK(kind_of([&] { subspace_error(l, random_subspace(rng, 7, 2)); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("subspace_error symmetry and tiny angles") {
  CounterRng rng(17);
  for (int i = 0; i < 100; ++i) {
    const Eigen::Index dim = uniform_int(rng, 2, 10);
    const Eigen::Index d = uniform_int(rng, 1, dim - 1);
    const LinearSubspace a = random_subspace(rng, dim, d);
    const LinearSubspace b = random_subspace(rng, dim, d);
    CHECK(subspace_error(a, a) < 1e-14);
    CHECK(std::abs(subspace_error(a, b) - subspace_error(b, a)) < 1e-12);
    CHECK(std::abs(subspace_error(a, b) - rsr::testing::sym_spectral_norm(a.projector() - b.projector())) < 1e-10);
  }
  // Rotation by 1e-13 rad keeps its relative size.
  const double t = 1e-13;
  const LinearSubspace a = span({{1, 0, 0}});
  const LinearSubspace b = span({{std::cos(t), std::sin(t), 0}});
  CHECK(std::abs(subspace_error(a, b) / t - 1.0) < 1e-3);
}

TEST_CASE("distance identity through principal vectors") {
  CounterRng rng(18);
  for (int i = 0; i < 100; ++i) {
    const Eigen::Index dim = uniform_int(rng, 3, 10);
    const Eigen::Index d = uniform_int(rng, 1, dim - 1);
    const LinearSubspace l = random_subspace(rng, dim, d);
    const LinearSubspace star = random_subspace(rng, dim, d);
    const PrincipalAngleDecomposition pa = principal_angles(l, star);
    const Vector x = star.basis() * gaussian_matrix(rng, d, 1).col(0);
    double rhs = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      const double s = std::sin(pa.angles(j));
      const double c = x.dot(pa.right.col(j));
      rhs += s * s * c * c;
    }
    const double lhs = std::pow(point_distance(x, l), 2);
    CHECK(std::abs(lhs - rhs) < 1e-10 * (1.0 + x.squaredNorm()));
  }
}

TEST_CASE("affine_rep_distance examples") {
  const AffineSubspace a{span({{1, 0}}), vec({0, 0})};
  const AffineSubspace up{span({{1, 0}}), vec({0, 1})};
  CHECK(affine_rep_distance(a, up) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(affine_rep_distance(a, a) < 1e-14);
  const AffineSubspace turned{span({{0, 1}}), vec({0, 0})};
  CHECK(affine_rep_distance(a, turned) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-14));

  // Zero for another representative of the same class, positive otherwise.
  CounterRng rng(19);
  const LinearSubspace l = random_subspace(rng, 5, 2);
  const AffineSubspace base{l, gaussian_matrix(rng, 5, 1).col(0)};
  const AffineSubspace same{l, base.offset + l.basis() * gaussian_matrix(rng, 2, 1, 5.0).col(0)};
  CHECK(affine_rep_distance(same, base) < 1e-12);
  const AffineSubspace other{l, base.offset + l.residual(gaussian_matrix(rng, 5, 1).col(0))};
  CHECK(affine_rep_distance(other, base) > 1e-3);

  CHECK(kind_of([&] { affine_rep_distance(a, base); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("rotated subspaces") {
  CounterRng rng(20);
  const LinearSubspace l = random_subspace(rng, 6, 3);
  const Matrix r = random_orthogonal(rng, 6);
  const LinearSubspace m = l.rotated(r);
  CHECK((m.projector() - r * l.projector() * r.transpose()).cwiseAbs().maxCoeff() < 1e-12);
}
