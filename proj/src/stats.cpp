#include "rsr/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rsr/error.hpp"
#include "rsr/kernels.hpp"
#include "rsr/rng.hpp"

namespace rsr {

namespace {

constexpr double kOnSubspace = 1e-12;

// Coordinates of the inliers in the basis of L*.
Matrix coordinates(const DataSet& inliers, const LinearSubspace& truth) {
  if (inliers.dim() != truth.ambient_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "inliers and L* live in different spaces");
  }
  return truth.basis().transpose() * inliers.points();
}

double l1_spread(const Matrix& y, const Vector& c) { return (y.transpose() * c).cwiseAbs().sum(); }

Vector sign_vector(const Vector& v) {
  Vector s(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) s(i) = v(i) > 0.0 ? 1.0 : (v(i) < 0.0 ? -1.0 : 0.0);
  return s;
}

Vector random_unit(CounterRng& rng, Eigen::Index d) {
  for (;;) {
    Vector c = gaussian_matrix(rng, d, 1).col(0);
    const double norm = c.norm();
    if (norm > 1e-8) return c / norm;
  }
}

// Unit vector orthogonal to the given columns of y (null direction of a d x (d-1) block).
std::optional<Vector> vertex(const Matrix& y, const std::vector<Eigen::Index>& cols) {
  const Eigen::Index d = y.rows();
  Matrix block(d, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) block.col(static_cast<Eigen::Index>(j)) = y.col(cols[j]);
  Eigen::JacobiSVD<Matrix> svd(block, Eigen::ComputeFullU);
  const Vector& sv = svd.singularValues();
  if (sv.size() == 0 || !(sv(sv.size() - 1) > 1e-12 * sv(0))) return std::nullopt;
  return Vector(svd.matrixU().col(d - 1));
}

// Walks from c to neighbouring vertices of the piecewise-linear spread while it
// keeps dropping. Minima of sum |c^T y| on the sphere sit where c is orthogonal
// to d-1 of the y's.
Vector polish_vertex(const Matrix& y, Vector c) {
  const Eigen::Index d = y.rows();
  const Eigen::Index n = y.cols();
  std::vector<Eigen::Index> usable;
  Vector norms = y.colwise().norm().transpose();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (norms(i) > 0.0) usable.push_back(i);
  }
  if (static_cast<Eigen::Index>(usable.size()) < d - 1) return c;
  double best = l1_spread(y, c);
  for (int round = 0; round < 50; ++round) {
    const Vector proj = y.transpose() * c;
    std::vector<Eigen::Index> order = usable;
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
      const double ra = std::abs(proj(a)) / norms(a);
      const double rb = std::abs(proj(b)) / norms(b);
      return ra != rb ? ra < rb : a < b;
    });
    const auto keep = static_cast<std::size_t>(d - 1);
    const std::size_t reach = std::min(order.size(), keep + 3);
    bool improved = false;
    // The d-1 nearest hyperplanes, then variants that swap the last one out.
    for (std::size_t swap = keep; swap <= reach && !improved; ++swap) {
      if (keep == 0) break;
      std::vector<Eigen::Index> cols(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep));
      if (swap > keep) {
        if (swap - 1 >= order.size()) break;
        cols.back() = order[swap - 1];
      }
      auto v = vertex(y, cols);
      if (!v) continue;
      Vector cand = *v;
      if (cand.dot(c) < 0.0) cand = -cand;
      const double val = l1_spread(y, cand);
      if (val < best - 1e-15 * best) {
        best = val;
        c = cand;
        improved = true;
      }
    }
    if (!improved) break;
  }
  return c;
}

Vector subgradient_min(const Matrix& y, Vector c, int steps) {
  Vector best_c = c;
  double best = l1_spread(y, c);
  for (int t = 0; t < steps; ++t) {
    const Vector g = y * sign_vector(y.transpose() * c);
    const Vector tangent = g - c.dot(g) * c;
    const double tn = tangent.norm();
    if (!(tn > 1e-15)) break;
    const double step = 0.5 / std::sqrt(static_cast<double>(t) + 1.0);
    c = (c - step * tangent / tn).normalized();
    const double val = l1_spread(y, c);
    if (val < best) {
      best = val;
      best_c = c;
    }
  }
  return best_c;
}

double spread_min(const Matrix& y, std::uint64_t seed) {
  const Eigen::Index d = y.rows();
  if (d == 1) return y.cwiseAbs().sum();
  constexpr int kStarts = 32;
  std::vector<double> values(kStarts);
#pragma omp parallel for schedule(static)
  for (int s = 0; s < kStarts; ++s) {
    CounterRng rng = CounterRng::stream(seed, static_cast<std::uint64_t>(s));
    Vector c = subgradient_min(y, random_unit(rng, d), 500);
    c = polish_vertex(y, c);
    values[static_cast<std::size_t>(s)] = l1_spread(y, c);
  }
  return *std::min_element(values.begin(), values.end());
}

double spread_max(const Matrix& y, std::uint64_t seed) {
  const Eigen::Index d = y.rows();
  if (d == 1) return y.cwiseAbs().sum();
  constexpr int kStarts = 32;
  std::vector<double> values(kStarts);
#pragma omp parallel for schedule(static)
  for (int s = 0; s < kStarts; ++s) {
    CounterRng rng = CounterRng::stream(seed ^ 0xa5a5a5a5ULL, static_cast<std::uint64_t>(s));
    Vector c = random_unit(rng, d);
    double val = l1_spread(y, c);
    // The spread is convex, so this fixed-point ascent never decreases it.
    for (int it = 0; it < 500; ++it) {
      const Vector g = y * sign_vector(y.transpose() * c);
      if (!(g.norm() > 0.0)) break;
      const Vector next = g.normalized();
      const double next_val = l1_spread(y, next);
      if (!(next_val > val)) break;
      c = next;
      val = next_val;
    }
    values[static_cast<std::size_t>(s)] = val;
  }
  return *std::max_element(values.begin(), values.end());
}

double sigma_d_of(const Matrix& y, Eigen::Index d) {
  Eigen::JacobiSVD<Matrix> svd(y);
  const Vector& sv = svd.singularValues();
  return d - 1 < sv.size() ? sv(d - 1) : 0.0;
}

double lower_bound_from_coords(const Matrix& y) {
  const Eigen::Index d = y.rows();
  const Eigen::Index n = y.cols();
  const Vector norms = y.colwise().norm().transpose();
  // sum |c^T y| >= sum (c^T y)^2 / ||y|| >= lambda_min(sum y y^T / ||y||).
  Matrix m = Matrix::Zero(d, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (norms(i) > 0.0) m.noalias() += y.col(i) * y.col(i).transpose() / norms(i);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
  const double quad = std::max(0.0, eig.eigenvalues()(0));
  // sum |c^T y| >= ||Y^T c||_2 >= sigma_d(Y).
  return std::max(quad, sigma_d_of(y, d));
}

double outlier_upper(const DataSet& outliers) {
  const double sum_norms = outliers.points().colwise().norm().sum();
  Eigen::JacobiSVD<Matrix> svd(outliers.points());
  const double spectral = svd.singularValues()(0);
  return std::min(sum_norms, std::sqrt(static_cast<double>(outliers.size())) * spectral);
}

double s_out_at(const Matrix& x, const Matrix& basis) {
  const Matrix y = basis.transpose() * x;
  Matrix r = x - basis * y;
  const Vector dist = r.colwise().norm().transpose();
  Matrix scaled_y = y;
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    scaled_y.col(i) *= dist(i) > kOnSubspace ? 1.0 / dist(i) : 0.0;
  }
  const Matrix m = scaled_y * r.transpose();
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

Matrix perturbed(const Matrix& basis, CounterRng& rng, double scale) {
  Matrix raw = basis + scale * gaussian_matrix(rng, basis.rows(), basis.cols());
  try {
    return orthonormalize(raw).basis();
  } catch (const Error&) {
    return basis;
  }
}

std::vector<Eigen::Index> random_subset(CounterRng& rng, Eigen::Index n, Eigen::Index k) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  for (Eigen::Index j = 0; j < k; ++j) {
    const auto span = static_cast<std::uint64_t>(n - j);
    const auto pick = j + static_cast<Eigen::Index>(rng() % span);
    std::swap(idx[static_cast<std::size_t>(j)], idx[static_cast<std::size_t>(pick)]);
  }
  idx.resize(static_cast<std::size_t>(k));
  return idx;
}

std::optional<LinearSubspace> span_of(const Matrix& points, const std::vector<Eigen::Index>& cols) {
  Matrix raw(points.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) raw.col(static_cast<Eigen::Index>(j)) = points.col(cols[j]);
  try {
    return orthonormalize(raw);
  } catch (const Error&) {
    return std::nullopt;
  }
}

double sum_of_distances(const Matrix& points, const LinearSubspace& subspace) {
  if (points.cols() == 0) return 0.0;
  return kernels::residual_norms(points, subspace.basis()).sum();
}

Matrix select_columns(const DataSet& data, bool inlier) {
  const auto& mask = data.mask();
  std::vector<Eigen::Index> idx;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i] == inlier) idx.push_back(static_cast<Eigen::Index>(i));
  }
  Matrix out(data.dim(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = data.points().col(idx[j]);
  return out;
}

double exact_or_lower_s_in(const Matrix& inlier_points, const LinearSubspace& truth) {
  const Matrix y = truth.basis().transpose() * inlier_points;
  return truth.dim() == 1 ? y.cwiseAbs().sum() : lower_bound_from_coords(y);
}

}  // namespace

SinEstimate s_in(const DataSet& inliers, const LinearSubspace& truth, std::uint64_t seed) {
  const Matrix y = coordinates(inliers, truth);
  return SinEstimate{spread_min(y, seed), truth.dim() == 1};
}

double s_in_lower_bound(const DataSet& inliers, const LinearSubspace& truth) {
  return lower_bound_from_coords(coordinates(inliers, truth));
}

double s_out_value(const DataSet& outliers, const LinearSubspace& subspace) {
  if (outliers.dim() != subspace.ambient_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "s_out_value: outliers and subspace live in different spaces");
  }
  return s_out_at(outliers.points(), subspace.basis());
}

SoutBounds s_out_bounds(const DataSet& outliers, Eigen::Index d, std::uint64_t seed) {
  const Eigen::Index dim = outliers.dim();
  if (d < 1 || d >= dim) throw Error(ErrorKind::DimensionMismatch, "s_out_bounds: need 1 <= d < D");
  const Matrix& x = outliers.points();
  const Eigen::Index n = x.cols();

  // Starts: spans of outlier subsets nudged off the points (where the statistic
  // is largest but undefined), plus uniformly random subspaces.
  constexpr int kSpanStarts = 12;
  constexpr int kRandomStarts = 6;
  constexpr int kStarts = kSpanStarts + kRandomStarts;
  const double nudges[] = {1e-1, 1e-3, 1e-6};
  std::vector<double> best(kStarts, 0.0);
#pragma omp parallel for schedule(static)
  for (int s = 0; s < kStarts; ++s) {
    CounterRng rng = CounterRng::stream(seed, static_cast<std::uint64_t>(s));
    Matrix basis;
    if (s < kSpanStarts && n >= d) {
      auto span = span_of(x, random_subset(rng, n, d));
      basis = span ? perturbed(span->basis(), rng, nudges[s % 3]) : random_subspace(rng, dim, d).basis();
    } else {
      basis = random_subspace(rng, dim, d).basis();
    }
    double value = s_out_at(x, basis);
    double step = 0.3;
    for (int it = 0; it < 300 && step > 1e-9; ++it) {
      const Matrix cand = perturbed(basis, rng, step);
      const double cv = s_out_at(x, cand);
      if (cv > value) {
        value = cv;
        basis = cand;
        step = std::min(1.0, step * 1.5);
      } else {
        step *= 0.7;
      }
    }
    best[static_cast<std::size_t>(s)] = value;
  }
  SoutBounds out;
  out.lower = *std::max_element(best.begin(), best.end());
  out.upper = outlier_upper(outliers);
  return out;
}

ConditionNumbers condition_numbers(const DataSet& inliers, const LinearSubspace& truth, std::uint64_t seed) {
  const Matrix y = coordinates(inliers, truth);
  const Eigen::Index d = truth.dim();
  Eigen::JacobiSVD<Matrix> svd(inliers.points());
  const Vector& sv = svd.singularValues();
  if (sv.size() < d || !(sv(d - 1) > 1e-12 * sv(0))) {
    throw Error(ErrorKind::RankDeficient, "condition_numbers: inlier matrix has rank below d");
  }
  ConditionNumbers out;
  out.kappa2 = (sv(0) * sv(0)) / (sv(d - 1) * sv(d - 1));
  out.kappa1 = spread_max(y, seed) / spread_min(y, seed);
  return out;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Satisfied: return "Satisfied";
    case Verdict::Refuted: return "Refuted";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "Unknown";
}

AssumptionReport check_assumption2(const DataSet& data, const LinearSubspace& truth, double theta0,
                                   const std::vector<double>& eps_grid, std::uint64_t seed) {
  if (eps_grid.empty()) throw Error(ErrorKind::ConfigInvalid, "check_assumption2: empty eps grid");
  if (data.dim() != truth.ambient_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "check_assumption2: data and L* live in different spaces");
  }
  const Eigen::Index d = truth.dim();
  const Matrix in_pts = select_columns(data, true);
  const Matrix out_pts = select_columns(data, false);

  AssumptionReport report;
  if (in_pts.cols() > 0) {
    const Matrix y = truth.basis().transpose() * in_pts;
    report.s_in_estimate = spread_min(y, seed);
    report.s_in_lower = d == 1 ? report.s_in_estimate : lower_bound_from_coords(y);
    if (d == 1) report.s_in_exact = report.s_in_estimate;
    if (in_pts.cols() >= d) {
      Eigen::JacobiSVD<Matrix> svd(in_pts);
      const Vector& sv = svd.singularValues();
      if (sv(d - 1) > 1e-12 * sv(0)) {
        report.kappa2 = (sv(0) * sv(0)) / (sv(d - 1) * sv(d - 1));
        report.kappa1 = spread_max(y, seed) / report.s_in_estimate;
      } else {
        report.kappa1 = report.kappa2 = std::numeric_limits<double>::infinity();
      }
    } else {
      report.kappa1 = report.kappa2 = std::numeric_limits<double>::infinity();
    }
  }
  if (out_pts.cols() > 0) {
    const DataSet outliers(out_pts);
    const SoutBounds b = s_out_bounds(outliers, d, seed);
    report.s_out_lower = b.lower;
    report.s_out_upper = b.upper;
  }

  const double sin0 = std::sin(theta0);
  const double cos0 = std::cos(theta0);
  const double root_d = std::sqrt(static_cast<double>(d));
  const double inf = std::numeric_limits<double>::infinity();
  bool all_conservative = true;
  bool any_optimistic_fails = false;
  for (double eps : eps_grid) {
    if (!(eps > 0.0)) throw Error(ErrorKind::NonPositiveEpsilon, "check_assumption2: eps must be > 0");
    ConditionMargin m;
    m.eps = eps;
    if (in_pts.cols() > 0) {
      const Vector w = in_pts.colwise().norm().transpose().array().max(eps).inverse().matrix();
      const Matrix scatter = kernels::weighted_scatter(in_pts, w);
      Eigen::SelfAdjointEigenSolver<Matrix> eig(scatter, Eigen::EigenvaluesOnly);
      const Vector& ev = eig.eigenvalues();  // ascending
      m.sigma_d_reg = std::max(0.0, ev(ev.size() - d));
    }
    auto angle_margin = [&](double s_out) {
      if (s_out == 0.0) return sin0;
      return m.sigma_d_reg > 0.0 ? sin0 - s_out / m.sigma_d_reg : -inf;
    };
    m.conservative_angle = angle_margin(report.s_out_upper);
    m.optimistic_angle = angle_margin(report.s_out_lower);
    m.conservative_balance = cos0 * report.s_in_lower - root_d * report.s_out_upper;
    m.optimistic_balance = cos0 * report.s_in_estimate - root_d * report.s_out_lower;
    if (in_pts.cols() == 0) {
      m.optimistic_balance = std::min(m.optimistic_balance, -0.0);
      m.conservative_balance = std::min(m.conservative_balance, -0.0);
    }
    all_conservative = all_conservative && m.conservative_angle >= 0.0 && m.conservative_balance >= 0.0;
    any_optimistic_fails = any_optimistic_fails || m.optimistic_angle < 0.0 || m.optimistic_balance < 0.0;
    report.margins.push_back(m);
  }
  // With no inliers S_in = 0 and the balance can only hold with S_out = 0 as
  // well, which still leaves sigma_d = 0 in the angle condition.
  if (in_pts.cols() == 0) any_optimistic_fails = true;
  if (any_optimistic_fails) {
    report.verdict = Verdict::Refuted;
  } else if (all_conservative) {
    report.verdict = Verdict::Satisfied;
  } else {
    report.verdict = Verdict::Inconclusive;
  }
  return report;
}

RefutationResult refute_assumption1(const DataSet& data, const LinearSubspace& truth, double gamma,
                                    const RefutationConfig& config,
                                    const std::vector<LinearSubspace>& extra_candidates) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw Error(ErrorKind::GammaOutOfRange, "refute_assumption1: gamma in (0, 1)");
  if (data.dim() != truth.ambient_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "refute_assumption1: data and L* live in different spaces");
  }
  const Eigen::Index n = data.size();
  const Eigen::Index n_in = data.inlier_count();
  const Eigen::Index d = truth.dim();
  const double gamma_star = static_cast<double>(n_in) / static_cast<double>(n);
  RefutationResult out;
  if (gamma >= gamma_star / 2.0) {
    out.refuted = true;
    out.reason = "gamma >= gamma_star / 2";
    return out;
  }

  const Matrix& x = data.points();
  const Vector norms = x.colwise().norm().transpose();
  auto members = [&](const Matrix& basis) {
    std::vector<bool> on(static_cast<std::size_t>(n), false);
    const Vector dist = basis.cols() == 0 ? norms : kernels::residual_norms(x, basis);
    for (Eigen::Index i = 0; i < n; ++i) on[static_cast<std::size_t>(i)] = dist(i) <= 1e-10 * std::max(1.0, norms(i));
    return on;
  };
  auto count = [](const std::vector<bool>& v) { return static_cast<Eigen::Index>(std::count(v.begin(), v.end(), true)); };

  CounterRng rng(config.seed);
  std::vector<std::vector<bool>> big;
  auto consider_big = [&](const LinearSubspace& cand) {
    if (cand.dim() != d || cand.ambient_dim() != data.dim()) return;
    if (subspace_error(cand, truth) < 1e-8) return;
    big.push_back(members(cand.basis()));
  };
  const int half = std::max(1, config.budget / 2);
  for (int t = 0; t < half && n >= d; ++t) {
    if (auto span = span_of(x, random_subset(rng, n, d))) consider_big(*span);
  }
  for (int t = 0; t < config.random_subspaces; ++t) consider_big(random_subspace(rng, data.dim(), d));
  for (const auto& c : extra_candidates) consider_big(c);

  std::vector<std::vector<bool>> small;
  if (d == 1) {
    small.push_back(members(Matrix(data.dim(), 0)));
  } else {
    const Matrix in_pts = select_columns(data, true);
    const Matrix in_proj = truth.basis() * (truth.basis().transpose() * in_pts);
    for (int t = 0; t < half && in_pts.cols() >= d - 1; ++t) {
      if (auto span = span_of(in_proj, random_subset(rng, in_pts.cols(), d - 1))) {
        small.push_back(members(span->basis()));
      }
    }
    if (small.empty()) small.push_back(members(Matrix(data.dim(), 0)));
  }

  auto union_count = [&](const std::vector<bool>& a, const std::vector<bool>& b) {
    Eigen::Index c = 0;
    for (std::size_t i = 0; i < a.size(); ++i) c += (a[i] || b[i]) ? 1 : 0;
    return c;
  };
  std::size_t best_small = 0;
  for (std::size_t j = 1; j < small.size(); ++j) {
    if (count(small[j]) > count(small[best_small])) best_small = j;
  }
  Eigen::Index best = count(small[best_small]);
  std::size_t best_big = 0;
  for (std::size_t j = 0; j < big.size(); ++j) {
    const Eigen::Index c = union_count(big[j], small[best_small]);
    if (c > best) {
      best = c;
      best_big = j;
    }
  }
  if (!big.empty()) {
    for (const auto& s : small) best = std::max(best, union_count(big[best_big], s));
  }
  out.best_fraction = static_cast<double>(best) / static_cast<double>(n);
  if (static_cast<double>(best) >= gamma * static_cast<double>(n)) {
    out.refuted = true;
    out.reason = "found L0 u L holding " + std::to_string(best) + " of " + std::to_string(n) + " points";
  }
  return out;
}

BoundAudit lemma4_audit(const DataSet& data, const LinearSubspace& truth, const LinearSubspace& subspace) {
  if (data.dim() != truth.ambient_dim() || subspace.ambient_dim() != truth.ambient_dim() ||
      subspace.dim() != truth.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "lemma4_audit: shapes differ");
  }
  const Matrix in_pts = select_columns(data, true);
  const Matrix out_pts = select_columns(data, false);
  if (in_pts.cols() == 0) throw Error(ErrorKind::EmptyInliers, "lemma4_audit: no inliers");
  const double f_in_l = sum_of_distances(in_pts, subspace);
  const double f_in_star = sum_of_distances(in_pts, truth);
  const double denom = f_in_l - f_in_star;
  if (!(denom > 1e-14 * (1.0 + std::abs(f_in_star)))) {
    throw Error(ErrorKind::DegenerateDenominator, "lemma4_audit: F_in(L) does not exceed F_in(L*)");
  }
  const double f_out_diff = std::abs(sum_of_distances(out_pts, subspace) - sum_of_distances(out_pts, truth));
  const Vector theta = principal_angles(subspace, truth).angles;
  const double s_out_upper = out_pts.cols() > 0 ? outlier_upper(DataSet(out_pts)) : 0.0;
  const double s_in_value = exact_or_lower_s_in(in_pts, truth);
  BoundAudit out;
  out.lhs = f_out_diff / denom;
  const double sin_sum = theta.array().sin().sum();
  out.rhs = s_in_value > 0.0 && sin_sum > 0.0
                ? std::sqrt(static_cast<double>(truth.dim())) * s_out_upper * theta.sum() / (s_in_value * sin_sum)
                : std::numeric_limits<double>::infinity();
  out.holds = out.lhs <= out.rhs * (1.0 + 1e-10) + 1e-12;
  return out;
}

BoundAudit lemma3_audit(const DataSet& data, const LinearSubspace& truth, const LinearSubspace& subspace,
                        double eps) {
  if (!(eps > 0.0)) throw Error(ErrorKind::NonPositiveEpsilon, "lemma3_audit: eps must be > 0");
  if (data.dim() != truth.ambient_dim() || subspace.ambient_dim() != truth.ambient_dim() ||
      subspace.dim() != truth.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "lemma3_audit: shapes differ");
  }
  const Matrix in_pts = select_columns(data, true);
  const Matrix out_pts = select_columns(data, false);
  if (in_pts.cols() == 0) throw Error(ErrorKind::EmptyInliers, "lemma3_audit: no inliers");
  BoundAudit out;
  const Vector in_dist = kernels::residual_norms(in_pts, subspace.basis());
  const auto far = (in_dist.array() > eps).count();
  out.applicable = 2 * far >= in_pts.cols();

  const Vector w = irls_weights(subspace_distances(data, subspace), eps);
  const Matrix scatter = kernels::weighted_scatter(data.points(), w);
  const Matrix& u = subspace.basis();
  const Matrix ut_s = u.transpose() * scatter;
  out.lhs = (ut_s - (ut_s * u) * u.transpose()).norm();

  const double theta1 = principal_angles(subspace, truth).angles(0);
  const double s_out_upper = out_pts.cols() > 0 ? outlier_upper(DataSet(out_pts)) : 0.0;
  out.rhs = std::cos(theta1) / (2.0 * std::sqrt(static_cast<double>(truth.dim()))) *
                exact_or_lower_s_in(in_pts, truth) -
            s_out_upper;
  out.holds = !out.applicable || out.lhs >= out.rhs - 1e-9 * (1.0 + std::abs(out.rhs));
  return out;
}

}  // namespace rsr
