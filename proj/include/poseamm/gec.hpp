#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "poseamm/geometry.hpp"
#include "poseamm/objective.hpp"

namespace poseamm {

using Vector18d = Eigen::Matrix<double, 18, 1>;
using Matrix18d = Eigen::Matrix<double, 18, 18>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;

// Two observations of the same 3D point, as Pluecker rays in frame 1 and
// frame 2. The pose (R, t) maps frame-2 coordinates into frame 1.
struct RayCorrespondence {
  PlueckerLine line1;
  PlueckerLine line2;
};

// The 6x6 generalized epipolar matrix [[E, R], [R, 0]] with E = skew(t) R.
Matrix6d generalized_epipolar_matrix(const Eigen::Matrix3d& rotation,
                                     const Eigen::Vector3d& translation);

// Stacked unknowns v = [vec(skew(t) R); vec(R)].
Vector18d gec_unknowns(const Eigen::Matrix3d& rotation,
                       const Eigen::Vector3d& translation);

// Coefficient vector a with a' v = l1' F l2.
Vector18d build_gec_vector(const RayCorrespondence& corr);

struct GecForm {
  Matrix18d m = Matrix18d::Zero();
  std::size_t num_correspondences = 0;
  // Optional triangular factor with root' root = m. Used for evaluation when
  // present; v' m v alone loses everything below about eps |m| near the truth.
  std::optional<Matrix18d> root;
};

// M = sum_i a_i a_i', plus its QR factor. Throws EmptyData on an empty input.
GecForm build_gec_form(const std::vector<RayCorrespondence>& corrs);

double gec_value(const GecForm& form, const Eigen::Matrix3d& rotation,
                 const Eigen::Vector3d& translation);
Eigen::Matrix3d gec_rotation_gradient(const GecForm& form, const Eigen::Matrix3d& rotation,
                                      const Eigen::Vector3d& translation);
Eigen::Vector3d gec_translation_gradient(const GecForm& form,
                                         const Eigen::Matrix3d& rotation,
                                         const Eigen::Vector3d& translation);

// d v' / d r (9 x 18) and d v' / d t (3 x 18).
Eigen::Matrix<double, 9, 18> gec_rotation_jacobian(const Eigen::Vector3d& translation);
Eigen::Matrix<double, 3, 18> gec_translation_jacobian(const Eigen::Matrix3d& rotation);

class GecObjective final : public ObjectiveFunction {
 public:
  explicit GecObjective(GecForm form) : form_(std::move(form)) {}
  explicit GecObjective(const std::vector<RayCorrespondence>& corrs)
      : form_(build_gec_form(corrs)) {}

  const GecForm& form() const { return form_; }

  double value(const Eigen::Matrix3d& rotation,
               const Eigen::Vector3d& translation) const override {
    return gec_value(form_, rotation, translation);
  }
  Eigen::Matrix3d rotation_gradient(const Eigen::Matrix3d& rotation,
                                    const Eigen::Vector3d& translation) const override {
    return gec_rotation_gradient(form_, rotation, translation);
  }
  Eigen::Vector3d translation_gradient(const Eigen::Matrix3d& rotation,
                                       const Eigen::Vector3d& translation) const override {
    return gec_translation_gradient(form_, rotation, translation);
  }

 private:
  GecForm form_;
};

}  // namespace poseamm
