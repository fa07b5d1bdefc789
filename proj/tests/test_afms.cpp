#include <doctest.h>

#include <cmath>

#include "rsr/afms.hpp"
#include "rsr/datagen.hpp"
#include "rsr/error.hpp"
#include "rsr/fms.hpp"
#include "rsr/rng.hpp"
#include "test_support.hpp"

using namespace rsr;
using rsr::testing::log_uniform;
using rsr::testing::uniform_int;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an rsr::Error");
  return ErrorKind::IoError;
}

SolverConfig dynamic(double gamma) {
  SolverConfig c;
  c.schedule = DynamicSmoothing{gamma};
  return c;
}

GeneratedData affine_haystack(std::uint64_t seed) {
  AffineHaystack h;
  h.ambient = 10;
  h.d = 3;
  h.n_in = 300;
  h.n_out = 100;
  return generate(ModelSpec{h, seed});
}

}  // namespace

TEST_CASE("afms_step: two points at equal distance give the midpoint") {
  Matrix x(2, 2);
  x << 0, 4,
       1, 3;
  // Both points lie at distance 1 from the horizontal line y = 2.
  const AffineSubspace line{LinearSubspace::from_orthonormal(Vector::Unit(2, 0)), Vector::Unit(2, 1) * 2.0};
  const AffineSubspace out = afms_step(DataSet(x), line, 0.1);
  CHECK((out.offset - Vector(x.rowwise().mean())).norm() < 1e-14);
}

TEST_CASE("afms_step lands on data lying exactly on an affine subspace") {
  CounterRng rng(51);
  for (int i = 0; i < 20; ++i) {
    const Eigen::Index dim = uniform_int(rng, 3, 8);
    const Eigen::Index d = uniform_int(rng, 1, dim - 1);
    const AffineSubspace truth{random_subspace(rng, dim, d), gaussian_matrix(rng, dim, 1, 3.0).col(0)};
    Matrix x = truth.direction.basis() * gaussian_matrix(rng, d, 30);
    x.colwise() += truth.offset;
    const AffineSubspace start{random_subspace(rng, dim, d), gaussian_matrix(rng, dim, 1).col(0)};
    CHECK(affine_rep_distance(afms_step(DataSet(x), start, 1e-3), truth) < 1e-10);
  }
}

TEST_CASE("afms_step is rotation and translation equivariant") {
  CounterRng rng(52);
  for (int i = 0; i < 100; ++i) {
    const Eigen::Index dim = uniform_int(rng, 2, 8);
    const Eigen::Index d = uniform_int(rng, 1, dim - 1);
    const Matrix x = gaussian_matrix(rng, dim, uniform_int(rng, dim + 2, 50));
    const AffineSubspace a{random_subspace(rng, dim, d), gaussian_matrix(rng, dim, 1).col(0)};
    const Matrix r = random_orthogonal(rng, dim);
    const Vector shift = gaussian_matrix(rng, dim, 1, 3.0).col(0);
    const double eps = log_uniform(rng, 1e-6, 1.0);
    const AffineSubspace base = afms_step(DataSet(x), a, eps);
    Matrix moved = r * x;
    moved.colwise() += shift;
    const AffineSubspace image = afms_step(DataSet(moved), AffineSubspace{a.direction.rotated(r), r * a.offset + shift}, eps);
    CHECK(subspace_error(image.direction, base.direction.rotated(r)) <= 1e-8);
    CHECK((image.offset - (r * base.offset + shift)).norm() <= 1e-8);
  }
}

TEST_CASE("afms_step errors") {
  CounterRng rng(53);
  const DataSet x(gaussian_matrix(rng, 4, 20));
  const AffineSubspace a{random_subspace(rng, 4, 2), Vector::Zero(4)};
  CHECK(kind_of([&] { afms_step(x, a, 0.0); }) == ErrorKind::NonPositiveEpsilon);
  CHECK(kind_of([&] { afms_step(x, AffineSubspace{random_subspace(rng, 4, 2), Vector::Zero(3)}, 1.0); }) ==
        ErrorKind::DimensionMismatch);
  CHECK(kind_of([&] { afms_step(DataSet(gaussian_matrix(rng, 4, 2)), a, 1.0); }) == ErrorKind::RankDeficient);
  Matrix line = gaussian_matrix(rng, 4, 1) * gaussian_matrix(rng, 1, 10);
  line.colwise() += Vector::Ones(4);
  CHECK(kind_of([&] { afms_step(DataSet(line), a, 1.0); }) == ErrorKind::RankDeficient);
}

TEST_CASE("solve_afms recovers the affine Haystack subspace from centered PCA") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const GeneratedData g = affine_haystack(seed);
    const AffineSubspace truth = g.affine_truth();
    const AfmsResult res = solve_afms(g.data, 3, CenteredPcaInit{}, dynamic(0.2), &truth);
    CHECK(affine_rep_distance(res.affine, truth) <= 1e-9);
    CHECK(res.trace.objective_nonincreasing(1e-12));
    CHECK(res.trace.eps_nonincreasing());
  }
}

TEST_CASE("AFMS with the mean held at zero matches FMS on symmetric data") {
  // Data symmetric under x -> -x keep every weighted mean at 0, so AFMS started
  // at m = 0 reproduces the FMS trajectory.
  CounterRng rng(54);
  const LinearSubspace star = random_subspace(rng, 5, 2);
  Matrix half(5, 60);
  half.leftCols(40) = star.basis() * gaussian_matrix(rng, 2, 40);
  half.rightCols(20) = gaussian_matrix(rng, 5, 20);
  Matrix x(5, 120);
  x << half, -half;
  const LinearSubspace start = random_subspace(rng, 5, 2);
  SolverConfig cfg = dynamic(0.2);
  cfg.max_iter = 30;
  const FmsResult lin = solve_fms(DataSet(x), 2, start, cfg);
  const AfmsResult aff = solve_afms(DataSet(x), 2, AffineSubspace{start, Vector::Zero(5)}, cfg);
  // Offsets may slide along L once the weights are extremely graded; only the
  // affine subspace itself is compared.
  CHECK(affine_rep_distance(aff.affine, AffineSubspace{lin.subspace, Vector::Zero(5)}) < 1e-10);
}

TEST_CASE("translating data and init translates the AFMS output") {
  const GeneratedData g = affine_haystack(7);
  CounterRng rng(55);
  const Vector shift = gaussian_matrix(rng, 10, 1, 4.0).col(0);
  Matrix moved = g.data.points();
  moved.colwise() += shift;
  const AffineSubspace start{random_subspace(rng, 10, 3), gaussian_matrix(rng, 10, 1).col(0)};
  SolverConfig cfg = dynamic(0.2);
  cfg.max_iter = 40;
  const AfmsResult base = solve_afms(g.data, 3, start, cfg);
  const AfmsResult shifted = solve_afms(DataSet(moved), 3, AffineSubspace{start.direction, start.offset + shift}, cfg);
  CHECK(affine_rep_distance(shifted.affine, AffineSubspace{base.affine.direction, base.affine.offset + shift}) <
        1e-8);
}

TEST_CASE("AFMS iterates do not depend on the init representative") {
  const GeneratedData g = affine_haystack(8);
  CounterRng rng(56);
  const AffineSubspace start{random_subspace(rng, 10, 3), gaussian_matrix(rng, 10, 1).col(0)};
  const AffineSubspace other{start.direction,
                             start.offset + start.direction.basis() * gaussian_matrix(rng, 3, 1, 5.0).col(0)};
  SolverConfig cfg = dynamic(0.2);
  cfg.max_iter = 25;
  cfg.record_iterates = true;
  const AfmsResult a = solve_afms(g.data, 3, start, cfg);
  const AfmsResult b = solve_afms(g.data, 3, other, cfg);
  // The weights see only distances, so every later iterate coincides.
  const std::size_t n = std::min(a.iterates.size(), b.iterates.size());
  REQUIRE(n > 1);
  for (std::size_t k = 0; k < n; ++k) CHECK(affine_rep_distance(b.iterates[k], a.iterates[k]) < 1e-10);
}

TEST_CASE("solve_afms errors") {
  CounterRng rng(57);
  const DataSet x(gaussian_matrix(rng, 4, 20));
  CHECK(kind_of([&] { solve_afms(x, 4, CenteredPcaInit{}, dynamic(0.1)); }) == ErrorKind::DimensionMismatch);
  CHECK(kind_of([&] {
          solve_afms(x, 2, AffineSubspace{random_subspace(rng, 4, 1), Vector::Zero(4)}, dynamic(0.1));
        }) == ErrorKind::InitDimensionMismatch);
}
