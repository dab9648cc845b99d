#pragma once

#include <optional>

#include <Eigen/Core>

#include "poseamm/geometry.hpp"

namespace poseamm {

using Matrix9d = Eigen::Matrix<double, 9, 9>;
using Vector9d = Eigen::Matrix<double, 9, 1>;
using Matrix39d = Eigen::Matrix<double, 3, 9>;
using Matrix13d = Eigen::Matrix<double, 13, 13>;

// Upper-triangular L (cols x cols) with L' L = rows' rows, from a QR of the
// stacked rows. Rows past the rank of `rows` are zero.
Eigen::MatrixXd square_root_factor(const Eigen::MatrixXd& rows);

// What the alternating solver needs from a pose problem: F(R, t) and its
// Euclidean gradients with respect to the entries of R and of t.
// Implementations must be safe to call concurrently.
class ObjectiveFunction {
 public:
  virtual ~ObjectiveFunction() = default;

  virtual double value(const Eigen::Matrix3d& rotation,
                       const Eigen::Vector3d& translation) const = 0;
  virtual Eigen::Matrix3d rotation_gradient(
      const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation) const = 0;
  virtual Eigen::Vector3d translation_gradient(
      const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation) const = 0;

  // Exact minimizer over t for a fixed rotation, when the objective has one
  // cheaply available. Used only when the solver is asked for it.
  virtual std::optional<Eigen::Vector3d> minimize_translation(
      const Eigen::Matrix3d& /*rotation*/) const {
    return std::nullopt;
  }
};

// F(R, t) = r' Mrr r + vr' r + t' Mtr r + t' Mtt t + vt' t + c,  r = vec(R).
// Shared by both absolute-pose objectives; evaluation cost does not depend
// on how many correspondences were folded into it.
struct QuadraticPoseForm {
  Matrix9d m_rr = Matrix9d::Zero();
  Vector9d v_r = Vector9d::Zero();
  Matrix39d m_tr = Matrix39d::Zero();
  Eigen::Matrix3d m_tt = Eigen::Matrix3d::Zero();
  Eigen::Vector3d v_t = Eigen::Vector3d::Zero();
  double c = 0.0;
  // False when built from too few correspondences to pin down a pose.
  bool well_posed = true;
  // Optional factor with F = |root [r; t; 1]|^2. When present, value and
  // gradients go through it, which keeps F accurate near a zero-residual
  // pose where the expanded sum cancels. Builders fill both.
  std::optional<Matrix13d> root;

  bool is_valid(double tol = 1e-10) const;
};

double quadratic_value(const QuadraticPoseForm& form, const Eigen::Matrix3d& rotation,
                       const Eigen::Vector3d& translation);

Vector9d quadratic_rotation_gradient_vec(const QuadraticPoseForm& form,
                                         const Eigen::Matrix3d& rotation,
                                         const Eigen::Vector3d& translation);

// 2 Mrr r + vr + Mtr' t, reshaped column-major.
Eigen::Matrix3d quadratic_rotation_gradient(const QuadraticPoseForm& form,
                                            const Eigen::Matrix3d& rotation,
                                            const Eigen::Vector3d& translation);

// 2 Mtt t + Mtr r + vt.
Eigen::Vector3d quadratic_translation_gradient(const QuadraticPoseForm& form,
                                               const Eigen::Matrix3d& rotation,
                                               const Eigen::Vector3d& translation);

// Solves 2 Mtt t = -(Mtr r + vt). Throws SingularTranslationSystem when
// the smallest singular value of Mtt is below 1e-12.
Eigen::Vector3d closed_form_translation(const QuadraticPoseForm& form,
                                        const Eigen::Matrix3d& rotation);

class QuadraticObjective final : public ObjectiveFunction {
 public:
  explicit QuadraticObjective(QuadraticPoseForm form) : form_(std::move(form)) {}

  const QuadraticPoseForm& form() const { return form_; }

  double value(const Eigen::Matrix3d& rotation,
               const Eigen::Vector3d& translation) const override {
    return quadratic_value(form_, rotation, translation);
  }
  Eigen::Matrix3d rotation_gradient(const Eigen::Matrix3d& rotation,
                                    const Eigen::Vector3d& translation) const override {
    return quadratic_rotation_gradient(form_, rotation, translation);
  }
  Eigen::Vector3d translation_gradient(const Eigen::Matrix3d& rotation,
                                       const Eigen::Vector3d& translation) const override {
    return quadratic_translation_gradient(form_, rotation, translation);
  }
  std::optional<Eigen::Vector3d> minimize_translation(
      const Eigen::Matrix3d& rotation) const override {
    return closed_form_translation(form_, rotation);
  }

 private:
  QuadraticPoseForm form_;
};

}  // namespace poseamm
