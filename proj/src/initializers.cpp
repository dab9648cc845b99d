#include "poseamm/initializers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "poseamm/errors.hpp"

namespace poseamm {
namespace {

constexpr std::size_t kMinRelativeCorrespondences = 17;
constexpr double kNullspaceGap = 1e-10;
constexpr double kSingularThreshold = 1e-12;
// |vec(R)|^2 for every rotation.
constexpr double kRotationNormSq = 3.0;

// Minimizes r' A r + b' r over |r|^2 = 3 (A symmetric PSD). With A = Q L Q'
// the minimizer is r = -(A - lambda I)^-1 b / 2 for the unique lambda below
// the smallest eigenvalue that puts r on the sphere. When b has no weight on
// the bottom eigenvector the sphere is reached by adding that eigenvector.
Vector9d minimize_on_rotation_sphere(const Matrix9d& a, const Vector9d& b) {
  Eigen::SelfAdjointEigenSolver<Matrix9d> eig(a);
  const Vector9d& lambda = eig.eigenvalues();
  const Matrix9d& q = eig.eigenvectors();
  const double scale = std::max(1.0, std::abs(lambda(8)));
  if (lambda(1) <= kSingularThreshold * scale) {
    throw SingularSystem("init_absolute_linear: rotation system has a repeated null direction");
  }

  const Vector9d beta = -0.5 * q.transpose() * b;
  auto norm_sq = [&](double shift, int first) {
    double acc = 0.0;
    for (int k = first; k < 9; ++k) {
      const double coeff = beta(k) / (lambda(k) - shift);
      acc += coeff * coeff;
    }
    return acc;
  };
  auto solution = [&](double shift) {
    Vector9d coeffs;
    for (int k = 0; k < 9; ++k) coeffs(k) = beta(k) / (lambda(k) - shift);
    return Vector9d(q * coeffs);
  };

  const double rest = norm_sq(lambda(0), 1);
  const double gap_needed =
      rest < kRotationNormSq ? std::abs(beta(0)) / std::sqrt(kRotationNormSq - rest)
                             : std::numeric_limits<double>::infinity();
  if (gap_needed <= kSingularThreshold * scale) {
    Vector9d coeffs = Vector9d::Zero();
    for (int k = 1; k < 9; ++k) coeffs(k) = beta(k) / (lambda(k) - lambda(0));
    coeffs(0) = std::sqrt(kRotationNormSq - rest);
    Vector9d r = q * coeffs;
    const bool flip = beta(0) != 0.0 ? beta(0) < 0.0 : unvec(r).determinant() < 0.0;
    if (flip) {
      coeffs(0) = -coeffs(0);
      r = q * coeffs;
    }
    return r;
  }

  // norm_sq(shift, 0) increases on (-inf, lambda_0); bracket and bisect.
  double hi = lambda(0);
  double lo = lambda(0) - beta.norm() / std::sqrt(kRotationNormSq) - scale * 1e-12;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (norm_sq(mid, 0) < kRotationNormSq ? lo : hi) = mid;
  }
  return solution(lo);
}

}  // namespace

Pose init_relative_17pt(const std::vector<RayCorrespondence>& corrs) {
  if (corrs.size() < kMinRelativeCorrespondences) {
    throw InsufficientData("init_relative_17pt: need at least 17 correspondences");
  }
  Eigen::MatrixXd stacked(static_cast<Eigen::Index>(corrs.size()), 18);
  for (std::size_t i = 0; i < corrs.size(); ++i) {
    stacked.row(static_cast<Eigen::Index>(i)) = build_gec_vector(corrs[i]).transpose();
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked, Eigen::ComputeFullV);
  Eigen::Matrix<double, 18, 1> sigma = Eigen::Matrix<double, 18, 1>::Zero();
  sigma.head(svd.singularValues().size()) = svd.singularValues();
  if (sigma(16) - sigma(17) <= kNullspaceGap * sigma(0)) {
    throw DegenerateNullspace("init_relative_17pt: null space is not one-dimensional");
  }

  const Vector18d null_vector = svd.matrixV().col(17);
  const Eigen::Matrix3d e_block = unvec(null_vector.head<9>());
  const Eigen::Matrix3d r_block = unvec(null_vector.tail<9>());

  // The null vector is defined up to sign. With exact data the rotation
  // block is a scaled rotation, so only one sign has a positive determinant;
  // projecting the other one is ill-posed (all singular values coincide).
  const bool positive = r_block.determinant() >= 0.0;
  const double sign = positive ? 1.0 : -1.0;

  Pose pose;
  pose.rotation = project_to_so3(sign * r_block);
  Eigen::JacobiSVD<Eigen::Matrix3d> block_svd(r_block);
  const double scale = block_svd.singularValues().mean();
  const Eigen::Matrix3d essential = sign * e_block / scale;
  pose.translation = unskew(essential * pose.rotation.transpose());
  return pose;
}

Pose init_absolute_linear(const QuadraticPoseForm& form) {
  Eigen::JacobiSVD<Eigen::Matrix3d> tt_svd(form.m_tt, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (!(tt_svd.singularValues()(2) > kSingularThreshold)) {
    throw SingularSystem("init_absolute_linear: translation block is singular");
  }
  const Eigen::Matrix3d tt_inv = tt_svd.solve(Eigen::Matrix3d::Identity());

  Matrix9d reduced = form.m_rr - 0.25 * form.m_tr.transpose() * tt_inv * form.m_tr;
  reduced = 0.5 * (reduced + reduced.transpose()).eval();
  const Vector9d linear = form.v_r - 0.5 * form.m_tr.transpose() * tt_inv * form.v_t;

  const Vector9d r = minimize_on_rotation_sphere(reduced, linear);

  Pose pose;
  pose.rotation = project_to_so3(unvec(r));
  pose.translation = closed_form_translation(form, pose.rotation);
  return pose;
}

std::vector<Pose> relative_pose_candidates(const Pose& pose) {
  const double norm = pose.translation.norm();
  if (!(norm > 0.0)) return {pose};
  const Eigen::Vector3d axis = pose.translation / norm;
  const Eigen::Matrix3d half_turn = 2.0 * axis * axis.transpose() - Eigen::Matrix3d::Identity();
  const Eigen::Matrix3d twisted = half_turn * pose.rotation;
  return {pose,
          Pose{pose.rotation, -pose.translation},
          Pose{twisted, pose.translation},
          Pose{twisted, -pose.translation}};
}

}  // namespace poseamm
