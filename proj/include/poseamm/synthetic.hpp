#pragma once

#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "poseamm/gec.hpp"
#include "poseamm/geometry.hpp"
#include "poseamm/gpnp.hpp"

namespace poseamm {

using Rng = std::mt19937_64;

enum class Rig { kCentral, kNonCentral };

// Synthetic scene parameters. Defaults: focal 800 px, depths in [4, 8],
// camera offsets in a +-0.5 cube, translations in a +-2 cube, rotation
// angles up to pi/2.
struct SceneConfig {
  int num_correspondences = 20;
  double noise_sigma_px = 0.0;
  double focal_px = 800.0;
  Rig rig = Rig::kNonCentral;
  double rig_extent = 0.5;
  double min_depth = 4.0;
  double max_depth = 8.0;
  double rotation_max_angle = std::numbers::pi / 2.0;
  double translation_extent = 2.0;
  std::uint64_t seed = 0;

  // Throws InvalidArgument on non-positive counts or unordered ranges.
  void validate() const;
};

struct AbsoluteScene {
  Pose ground_truth;
  std::vector<PointRayCorrespondence> corrs;
};

struct RelativeScene {
  Pose ground_truth;
  std::vector<RayCorrespondence> corrs;
};

// Both generators draw from Rng(config.seed) and are deterministic.
AbsoluteScene generate_absolute_scene(const SceneConfig& config);
RelativeScene generate_relative_scene(const SceneConfig& config);

Eigen::Vector3d random_unit_vector(Rng& rng);
Pose random_pose(Rng& rng, double max_angle, double translation_extent);

// Perturbs the bearing by isotropic Gaussian pixel noise on the image plane
// tangent to it at distance focal_px, then renormalizes. Returns the input
// unchanged when sigma_px is zero.
Eigen::Vector3d apply_pixel_noise(const Eigen::Vector3d& bearing, double sigma_px,
                                  double focal_px, Rng& rng);

struct PoseErrors {
  double rotation = 0.0;     // |R_gt - R_est|_F
  double translation = 0.0;  // |t_gt - t_est|
};

PoseErrors pose_errors(const Pose& ground_truth, const Pose& estimate);

// Mixes a base seed with further stream identifiers (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

}  // namespace poseamm
