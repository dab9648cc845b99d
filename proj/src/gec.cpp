#include "poseamm/gec.hpp"

#include "poseamm/errors.hpp"

namespace poseamm {

Matrix6d generalized_epipolar_matrix(const Eigen::Matrix3d& rotation,
                                     const Eigen::Vector3d& translation) {
  Matrix6d f = Matrix6d::Zero();
  f.topLeftCorner<3, 3>() = skew(translation) * rotation;
  f.topRightCorner<3, 3>() = rotation;
  f.bottomLeftCorner<3, 3>() = rotation;
  return f;
}

Vector18d gec_unknowns(const Eigen::Matrix3d& rotation,
                       const Eigen::Vector3d& translation) {
  Vector18d v;
  v << vec(skew(translation) * rotation), vec(rotation);
  return v;
}

Vector18d build_gec_vector(const RayCorrespondence& corr) {
  // k multiplies vec(F) for the 6x6 F; column j of F occupies k(6j .. 6j+5).
  const Eigen::Matrix<double, 36, 1> k =
      kron(corr.line2.coordinates(), corr.line1.coordinates());
  Vector18d a;
  for (int col = 0; col < 3; ++col) {
    // E(:, col) sits in rows 0-2 of F column col.
    a.segment<3>(3 * col) = k.segment<3>(6 * col);
    // R(:, col) appears twice: rows 3-5 of F column col and rows 0-2 of F
    // column col + 3. Rows 3-5 of columns 3-5 are the zero block.
    a.segment<3>(9 + 3 * col) = k.segment<3>(6 * col + 3) + k.segment<3>(6 * (col + 3));
  }
  return a;
}

GecForm build_gec_form(const std::vector<RayCorrespondence>& corrs) {
  if (corrs.empty()) throw EmptyData("build_gec_form: no correspondences");
  GecForm form;
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(corrs.size()), 18);
  for (std::size_t i = 0; i < corrs.size(); ++i) {
    const Vector18d a = build_gec_vector(corrs[i]);
    rows.row(static_cast<Eigen::Index>(i)) = a.transpose();
    form.m.selfadjointView<Eigen::Lower>().rankUpdate(a);
  }
  form.m.triangularView<Eigen::StrictlyUpper>() =
      form.m.triangularView<Eigen::StrictlyLower>().transpose();
  form.root = Matrix18d(square_root_factor(rows));
  form.num_correspondences = corrs.size();
  return form;
}

double gec_value(const GecForm& form, const Eigen::Matrix3d& rotation,
                 const Eigen::Vector3d& translation) {
  const Vector18d v = gec_unknowns(rotation, translation);
  if (form.root) return (*form.root * v).squaredNorm();
  return v.dot(form.m * v);
}

namespace {

Vector18d gec_m_times(const GecForm& form, const Vector18d& v) {
  if (form.root) return form.root->transpose() * (*form.root * v);
  return form.m * v;
}

}  // namespace

Eigen::Matrix<double, 9, 18> gec_rotation_jacobian(const Eigen::Vector3d& translation) {
  Eigen::Matrix<double, 9, 18> j = Eigen::Matrix<double, 9, 18>::Zero();
  const Eigen::Matrix3d minus_t_hat = -skew(translation);
  for (int b = 0; b < 3; ++b) {
    j.block<3, 3>(3 * b, 3 * b) = minus_t_hat;
    j.block<3, 3>(3 * b, 9 + 3 * b).setIdentity();
  }
  return j;
}

Eigen::Matrix<double, 3, 18> gec_translation_jacobian(const Eigen::Matrix3d& rotation) {
  Eigen::Matrix<double, 3, 18> j = Eigen::Matrix<double, 3, 18>::Zero();
  for (int b = 0; b < 3; ++b) j.block<3, 3>(0, 3 * b) = skew(rotation.col(b));
  return j;
}

Eigen::Matrix3d gec_rotation_gradient(const GecForm& form, const Eigen::Matrix3d& rotation,
                                      const Eigen::Vector3d& translation) {
  const Vector18d mv = gec_m_times(form, gec_unknowns(rotation, translation));
  const Vector9d g = 2.0 * gec_rotation_jacobian(translation) * mv;
  return unvec(g);
}

Eigen::Vector3d gec_translation_gradient(const GecForm& form,
                                         const Eigen::Matrix3d& rotation,
                                         const Eigen::Vector3d& translation) {
  const Vector18d mv = gec_m_times(form, gec_unknowns(rotation, translation));
  return 2.0 * gec_translation_jacobian(rotation) * mv;
}

}  // namespace poseamm
