#include "poseamm/objective.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace poseamm {

bool QuadraticPoseForm::is_valid(double tol) const {
  if (!m_rr.allFinite() || !v_r.allFinite() || !m_tr.allFinite() ||
      !m_tt.allFinite() || !v_t.allFinite() || !std::isfinite(c)) {
    return false;
  }
  const double scale_rr = std::max(1.0, m_rr.norm());
  const double scale_tt = std::max(1.0, m_tt.norm());
  if ((m_rr - m_rr.transpose()).norm() > tol * scale_rr) return false;
  if ((m_tt - m_tt.transpose()).norm() > tol * scale_tt) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(m_tt, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() >= -tol * scale_tt;
}

Eigen::MatrixXd square_root_factor(const Eigen::MatrixXd& rows) {
  const Eigen::Index n = rows.cols();
  Eigen::MatrixXd root = Eigen::MatrixXd::Zero(n, n);
  if (rows.rows() == 0) return root;
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(rows);
  const Eigen::Index k = std::min(rows.rows(), n);
  root.topRows(k) = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  return root;
}

namespace {

Eigen::Matrix<double, 13, 1> augmented(const Eigen::Matrix3d& rotation,
                                       const Eigen::Vector3d& translation) {
  Eigen::Matrix<double, 13, 1> z;
  z << vec(rotation), translation, 1.0;
  return z;
}

// dF/dz = 2 L' L z; the last entry belongs to the constant 1.
Eigen::Matrix<double, 13, 1> root_gradient(const Matrix13d& root, const Eigen::Matrix3d& rotation,
                                           const Eigen::Vector3d& translation) {
  return 2.0 * root.transpose() * (root * augmented(rotation, translation));
}

}  // namespace

double quadratic_value(const QuadraticPoseForm& form, const Eigen::Matrix3d& rotation,
                       const Eigen::Vector3d& translation) {
  if (form.root) return (*form.root * augmented(rotation, translation)).squaredNorm();
  const Vector9d r = vec(rotation);
  const Eigen::Vector3d& t = translation;
  return r.dot(form.m_rr * r) + form.v_r.dot(r) + t.dot(form.m_tr * r) +
         t.dot(form.m_tt * t) + form.v_t.dot(t) + form.c;
}

Vector9d quadratic_rotation_gradient_vec(const QuadraticPoseForm& form,
                                         const Eigen::Matrix3d& rotation,
                                         const Eigen::Vector3d& translation) {
  if (form.root) return root_gradient(*form.root, rotation, translation).head<9>();
  const Vector9d r = vec(rotation);
  return 2.0 * form.m_rr * r + form.v_r + form.m_tr.transpose() * translation;
}

Eigen::Matrix3d quadratic_rotation_gradient(const QuadraticPoseForm& form,
                                            const Eigen::Matrix3d& rotation,
                                            const Eigen::Vector3d& translation) {
  return unvec(quadratic_rotation_gradient_vec(form, rotation, translation));
}

Eigen::Vector3d quadratic_translation_gradient(const QuadraticPoseForm& form,
                                               const Eigen::Matrix3d& rotation,
                                               const Eigen::Vector3d& translation) {
  if (form.root) return root_gradient(*form.root, rotation, translation).segment<3>(9);
  return 2.0 * form.m_tt * translation + form.m_tr * vec(rotation) + form.v_t;
}

Eigen::Vector3d closed_form_translation(const QuadraticPoseForm& form,
                                        const Eigen::Matrix3d& rotation) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(form.m_tt,
                                        Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (!(svd.singularValues()(2) > 1e-12)) {
    throw SingularTranslationSystem("closed_form_translation: Mtt is singular");
  }
  const Eigen::Vector3d rhs = -(form.m_tr * vec(rotation) + form.v_t);
  return svd.solve(rhs) / 2.0;
}

}  // namespace poseamm
