#include "rsr/datagen.hpp"

#include <cmath>
#include <string>

#include "rsr/error.hpp"
#include "rsr/rng.hpp"

namespace rsr {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::InvalidSpec, what);
}

std::vector<bool> mask_of(Eigen::Index n_in, Eigen::Index n_out) {
  std::vector<bool> mask(static_cast<std::size_t>(n_in + n_out), false);
  std::fill(mask.begin(), mask.begin() + n_in, true);
  return mask;
}

Matrix stack(const Matrix& in, const Matrix& out) {
  Matrix all(in.rows(), in.cols() + out.cols());
  all << in, out;
  return all;
}

// Symmetric PSD square root plus the eigenvectors spanning its range.
struct Root {
  Matrix sqrt;
  Matrix range;
};

Root psd_root(const Matrix& s, const char* name) {
  require(s.rows() == s.cols() && s.rows() > 0, std::string(name) + " must be square");
  require(s.allFinite() && (s - s.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + s.cwiseAbs().maxCoeff()),
          std::string(name) + " must be symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(s);
  const Vector& ev = eig.eigenvalues();
  const double top = ev.cwiseAbs().maxCoeff();
  require(ev(0) >= -1e-12 * top, std::string(name) + " must be positive semidefinite");
  Root out;
  Vector clipped = ev.cwiseMax(0.0);
  out.sqrt = eig.eigenvectors() * clipped.cwiseSqrt().asDiagonal() * eig.eigenvectors().transpose();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) rank += ev(i) > 1e-12 * top ? 1 : 0;
  out.range = eig.eigenvectors().rightCols(rank);
  return out;
}

GeneratedData make(const Haystack& m, CounterRng& rng) {
  require(m.ambient >= 2 && m.d >= 1 && m.d < m.ambient, "Haystack: need 1 <= d < D");
  require(m.n_in >= 0 && m.n_out >= 0 && m.n_in + m.n_out >= 1, "Haystack: need at least one point");
  require(m.sigma_in > 0.0 && m.sigma_out > 0.0, "Haystack: sigmas must be positive");
  LinearSubspace truth = random_subspace(rng, m.ambient, m.d);
  const Matrix in = truth.basis() * gaussian_matrix(rng, m.d, m.n_in, m.sigma_in / std::sqrt(double(m.d)));
  const Matrix out = gaussian_matrix(rng, m.ambient, m.n_out, m.sigma_out / std::sqrt(double(m.ambient)));
  return GeneratedData{DataSet(stack(in, out), mask_of(m.n_in, m.n_out)), std::move(truth),
                       Vector::Zero(m.ambient), std::nullopt};
}

GeneratedData make(const GeneralizedHaystack& m, CounterRng& rng) {
  require(m.n >= 1, "GeneralizedHaystack: need n >= 1");
  require(m.alpha_in > 0.0 && m.alpha_in < 1.0, "GeneralizedHaystack: alpha_in must lie in (0, 1)");
  require(m.sigma_in.rows() == m.sigma_out.rows(), "GeneralizedHaystack: covariance sizes differ");
  const Root in_root = psd_root(m.sigma_in, "Sigma_in");
  const Root out_root = psd_root(m.sigma_out, "Sigma_out");
  const Eigen::Index dim = m.sigma_in.rows();
  const Eigen::Index d = in_root.range.cols();
  require(d >= 1 && d < dim, "GeneralizedHaystack: Sigma_in must have rank in [1, D)");
  const auto n_in = static_cast<Eigen::Index>(std::llround(m.alpha_in * static_cast<double>(m.n)));
  const Eigen::Index n_out = m.n - n_in;
  LinearSubspace truth = orthonormalize(in_root.range);
  Matrix in = in_root.sqrt * gaussian_matrix(rng, dim, n_in, 1.0 / std::sqrt(double(d)));
  // Remove the rounding residue outside the range so inliers sit on L* exactly.
  in = truth.basis() * (truth.basis().transpose() * in);
  const Matrix out = out_root.sqrt * gaussian_matrix(rng, dim, n_out, 1.0 / std::sqrt(double(dim)));
  return GeneratedData{DataSet(stack(in, out), mask_of(n_in, n_out)), std::move(truth), Vector::Zero(dim),
                       std::nullopt};
}

GeneratedData make(const DualSubspaceAdversarial& m, CounterRng& rng) {
  require(m.d >= 1 && m.d_out >= 1, "DualSubspaceAdversarial: need d, d_out >= 1");
  require(m.n >= 1, "DualSubspaceAdversarial: need n >= 1");
  require(m.inlier_fraction > 0.0 && m.inlier_fraction <= 1.0,
          "DualSubspaceAdversarial: inlier_fraction must lie in (0, 1]");
  const Eigen::Index dim = m.d + m.d_out;
  const auto n_in = static_cast<Eigen::Index>(std::llround(m.inlier_fraction * static_cast<double>(m.n)));
  const Eigen::Index n_out = m.n - n_in;
  require(n_in >= 1, "DualSubspaceAdversarial: no inliers at this fraction");
  LinearSubspace truth = random_subspace(rng, dim, m.d);
  LinearSubspace outlier_space;
  if (m.orthogonal_outliers) {
    Eigen::JacobiSVD<Matrix> svd(truth.basis(), Eigen::ComputeFullU);
    outlier_space = LinearSubspace::from_orthonormal(svd.matrixU().rightCols(m.d_out));
  } else {
    outlier_space = random_subspace(rng, dim, m.d_out);
  }
  const Matrix in = truth.basis() * gaussian_matrix(rng, m.d, n_in);
  const Matrix out = outlier_space.basis() * gaussian_matrix(rng, m.d_out, n_out);
  DataSet data(stack(in, out), mask_of(n_in, n_out));
  if (m.sphereize) data = sphereize(data);
  return GeneratedData{std::move(data), std::move(truth), Vector::Zero(dim), std::move(outlier_space)};
}

GeneratedData make(const AffineHaystack& m, CounterRng& rng) {
  require(m.ambient >= 2 && m.d >= 1 && m.d < m.ambient, "AffineHaystack: need 1 <= d < D");
  require(m.n_in >= m.d + 1 && m.n_out >= 0, "AffineHaystack: need n_in >= d + 1");
  require(m.sigma_in > 0.0 && m.sigma_out > 0.0 && m.offset_norm >= 0.0, "AffineHaystack: bad scales");
  LinearSubspace truth = random_subspace(rng, m.ambient, m.d);
  Vector offset = gaussian_matrix(rng, m.ambient, 1).col(0);
  offset *= m.offset_norm / offset.norm();
  Matrix in = truth.basis() * gaussian_matrix(rng, m.d, m.n_in, m.sigma_in / std::sqrt(double(m.d)));
  Matrix out = gaussian_matrix(rng, m.ambient, m.n_out, m.sigma_out / std::sqrt(double(m.ambient)));
  in.colwise() += offset;
  out.colwise() += offset;
  return GeneratedData{DataSet(stack(in, out), mask_of(m.n_in, m.n_out)), std::move(truth), std::move(offset),
                       std::nullopt};
}

}  // namespace

GeneratedData generate(const ModelSpec& spec) {
  CounterRng rng(spec.seed);
  return std::visit([&](const auto& m) { return make(m, rng); }, spec.model);
}

DataSet sphereize(const DataSet& data) {
  Matrix pts = data.points();
  for (Eigen::Index i = 0; i < pts.cols(); ++i) {
    const double norm = pts.col(i).norm();
    if (!(norm > 0.0)) throw Error(ErrorKind::ZeroPoint, "sphereize: point " + std::to_string(i) + " is zero");
    pts.col(i) /= norm;
  }
  if (data.has_mask()) return DataSet(std::move(pts), data.mask());
  return DataSet(std::move(pts));
}

LinearSubspace orthogonal_saddle_init(const LinearSubspace& truth, const LinearSubspace& outlier_subspace,
                                      Eigen::Index d) {
  if (truth.ambient_dim() != outlier_subspace.ambient_dim()) {
    throw Error(ErrorKind::IncompatibleGeometry, "orthogonal_saddle_init: ambient dimensions differ");
  }
  if (d < 1 || d - 1 > truth.dim() || outlier_subspace.dim() < 1) {
    throw Error(ErrorKind::IncompatibleGeometry, "orthogonal_saddle_init: need d - 1 <= dim L*");
  }
  const double overlap = (truth.basis().transpose() * outlier_subspace.basis()).cwiseAbs().maxCoeff();
  if (overlap > 1e-10) {
    throw Error(ErrorKind::IncompatibleGeometry, "orthogonal_saddle_init: outlier subspace is not orthogonal to L*");
  }
  Matrix raw(truth.ambient_dim(), d);
  raw << truth.basis().leftCols(d - 1), outlier_subspace.basis().col(0);
  return orthonormalize(raw);
}

}  // namespace rsr
