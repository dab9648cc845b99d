#include "poseamm/gpnp.hpp"

#include "poseamm/errors.hpp"

namespace poseamm {
namespace {

// I - v v' / (v' v); equals its own square and transpose.
Eigen::Matrix3d ray_orthogonal_projector(const Eigen::Vector3d& bearing) {
  return Eigen::Matrix3d::Identity() - bearing * bearing.transpose() / bearing.squaredNorm();
}

}  // namespace

Eigen::Vector3d gpnp_residual(const PointRayCorrespondence& corr,
                              const Eigen::Matrix3d& rotation,
                              const Eigen::Vector3d& translation) {
  return ray_orthogonal_projector(corr.ray.bearing) *
         (rotation * corr.point + translation - corr.ray.offset);
}

QuadraticPoseForm build_gpnp_form(const std::vector<PointRayCorrespondence>& corrs) {
  if (corrs.empty()) throw EmptyData("build_gpnp_form: no correspondences");

  QuadraticPoseForm form;
  // Residual i is rows(3i .. 3i+2) [r; t; 1].
  Eigen::MatrixXd rows(3 * static_cast<Eigen::Index>(corrs.size()), 13);
  Eigen::Index row = 0;
  for (const PointRayCorrespondence& corr : corrs) {
    const Eigen::Vector3d& x = corr.point;
    const Eigen::Vector3d& c = corr.ray.offset;
    const Eigen::Matrix3d i_minus_v = ray_orthogonal_projector(corr.ray.bearing);
    const Eigen::Matrix3d q = i_minus_v.transpose() * i_minus_v;

    // (x' kron (I - V)) r = (I - V) R x.
    const Matrix39d b = kron(x.transpose(), i_minus_v);
    const Matrix39d x_kron_q = kron(x.transpose(), q);

    form.m_rr.noalias() += b.transpose() * b;
    form.v_r.noalias() -= 2.0 * kron(x, (q * c).eval());
    form.m_tr.noalias() += 2.0 * x_kron_q;
    form.m_tt.noalias() += q;
    form.v_t.noalias() -= 2.0 * q * c;
    form.c += c.dot(q * c);

    rows.block<3, 9>(row, 0) = b;
    rows.block<3, 3>(row, 9) = i_minus_v;
    rows.block<3, 1>(row, 12) = -i_minus_v * c;
    row += 3;
  }
  form.root = Matrix13d(square_root_factor(rows));
  form.well_posed = corrs.size() >= 3;
  return form;
}

}  // namespace poseamm
