#pragma once

#include <vector>

#include <Eigen/Core>

#include "poseamm/geometry.hpp"
#include "poseamm/objective.hpp"

namespace poseamm {

// A world point and the camera ray that observes it. The pose (R, t) maps
// world coordinates into the camera frame.
struct PointRayCorrespondence {
  Point3 point = Point3::Zero();
  ObservedRay ray;
};

// (I - V)(R x + t - c) with V the projector onto the bearing; its norm is
// the distance from the transformed point to the ray.
Eigen::Vector3d gpnp_residual(const PointRayCorrespondence& corr,
                              const Eigen::Matrix3d& rotation,
                              const Eigen::Vector3d& translation);

// Folds the sum of squared point-to-ray distances into a quadratic form.
// Bearings need not be unit length. Throws EmptyData on an empty input;
// fewer than three correspondences yields a form with well_posed = false.
QuadraticPoseForm build_gpnp_form(const std::vector<PointRayCorrespondence>& corrs);

}  // namespace poseamm
