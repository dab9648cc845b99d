#pragma once

#include <vector>

#include "poseamm/gec.hpp"
#include "poseamm/geometry.hpp"
#include "poseamm/objective.hpp"

namespace poseamm {

// Linear relative pose from the null vector of the stacked GEC coefficients.
// Throws InsufficientData (fewer than 17 correspondences) or
// DegenerateNullspace (two smallest singular values within 1e-10 relative).
Pose init_relative_17pt(const std::vector<RayCorrespondence>& corrs);

// Linear absolute pose from a quadratic form. The translation is eliminated
// through the stationarity condition in t, the reduced quadratic in r is
// minimized over |r|^2 = 3 (the squared Frobenius norm of any rotation), r is
// projected to SO(3), and t is recomputed in closed form. Throws
// SingularSystem when Mtt is singular or the reduced problem has more than
// one null direction (collinear or otherwise degenerate points).
Pose init_absolute_linear(const QuadraticPoseForm& form);

inline Pose init_identity() { return Pose{}; }

// The four relative poses whose essential blocks skew(t) R agree with
// `pose`'s up to sign: (R, t), (R, -t) and the twisted pair (H R, +-t) with
// H the half-turn about t. The first entry is `pose` itself. With t = 0 only
// `pose` is returned.
std::vector<Pose> relative_pose_candidates(const Pose& pose);

}  // namespace poseamm
