#include "poseamm/synthetic.hpp"

#include <cmath>

#include "poseamm/errors.hpp"

namespace poseamm {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Eigen::Vector3d uniform_cube(Rng& rng, double half_width) {
  if (half_width == 0.0) return Eigen::Vector3d::Zero();
  return {uniform(rng, -half_width, half_width), uniform(rng, -half_width, half_width),
          uniform(rng, -half_width, half_width)};
}

Eigen::Vector3d camera_offset(Rng& rng, const SceneConfig& config) {
  return config.rig == Rig::kCentral ? Eigen::Vector3d::Zero()
                                     : uniform_cube(rng, config.rig_extent);
}

}  // namespace

void SceneConfig::validate() const {
  if (num_correspondences < 1) throw InvalidArgument("SceneConfig: need at least one point");
  if (!(noise_sigma_px >= 0.0)) throw InvalidArgument("SceneConfig: negative noise");
  if (!(focal_px > 0.0)) throw InvalidArgument("SceneConfig: focal length must be positive");
  if (!(rig_extent >= 0.0) || !(translation_extent >= 0.0) || !(rotation_max_angle >= 0.0)) {
    throw InvalidArgument("SceneConfig: extents must be non-negative");
  }
  if (!(min_depth > 0.0) || !(max_depth >= min_depth)) {
    throw InvalidArgument("SceneConfig: depth range must be positive and ordered");
  }
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(splitmix64(base) ^ a) ^ b);
}

Eigen::Vector3d random_unit_vector(Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Vector3d v;
  do {
    v = {normal(rng), normal(rng), normal(rng)};
  } while (v.squaredNorm() < 1e-12);
  return v.normalized();
}

Pose random_pose(Rng& rng, double max_angle, double translation_extent) {
  const Eigen::Vector3d axis = random_unit_vector(rng);
  const double angle = uniform(rng, 0.0, max_angle);
  Pose pose;
  pose.rotation = rodrigues_step(axis, angle);
  pose.translation = uniform_cube(rng, translation_extent);
  return pose;
}

Eigen::Vector3d apply_pixel_noise(const Eigen::Vector3d& bearing, double sigma_px,
                                  double focal_px, Rng& rng) {
  if (sigma_px == 0.0) return bearing;
  const Eigen::Vector3d b = bearing.normalized();
  // Any unit vector not parallel to b seeds the tangent basis.
  const Eigen::Vector3d seed =
      std::abs(b.x()) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
  const Eigen::Vector3d e1 = b.cross(seed).normalized();
  const Eigen::Vector3d e2 = b.cross(e1);
  std::normal_distribution<double> normal(0.0, sigma_px);
  const double du = normal(rng);
  const double dv = normal(rng);
  return (focal_px * b + du * e1 + dv * e2).normalized();
}

AbsoluteScene generate_absolute_scene(const SceneConfig& config) {
  config.validate();
  Rng rng(config.seed);
  AbsoluteScene scene;
  scene.ground_truth = random_pose(rng, config.rotation_max_angle, config.translation_extent);
  const Eigen::Matrix3d& r = scene.ground_truth.rotation;
  const Eigen::Vector3d& t = scene.ground_truth.translation;

  scene.corrs.reserve(static_cast<std::size_t>(config.num_correspondences));
  for (int i = 0; i < config.num_correspondences; ++i) {
    const Eigen::Vector3d offset = camera_offset(rng, config);
    const Eigen::Vector3d direction = random_unit_vector(rng);
    const double depth = uniform(rng, config.min_depth, config.max_depth);
    const Eigen::Vector3d in_camera = offset + depth * direction;

    PointRayCorrespondence corr;
    corr.point = r.transpose() * (in_camera - t);
    corr.ray.offset = offset;
    corr.ray.bearing = apply_pixel_noise(direction, config.noise_sigma_px, config.focal_px, rng);
    scene.corrs.push_back(corr);
  }
  return scene;
}

RelativeScene generate_relative_scene(const SceneConfig& config) {
  config.validate();
  Rng rng(config.seed);
  RelativeScene scene;
  scene.ground_truth = random_pose(rng, config.rotation_max_angle, config.translation_extent);
  const Eigen::Matrix3d& r = scene.ground_truth.rotation;
  const Eigen::Vector3d& t = scene.ground_truth.translation;

  scene.corrs.reserve(static_cast<std::size_t>(config.num_correspondences));
  for (int i = 0; i < config.num_correspondences; ++i) {
    const Eigen::Vector3d center1 = camera_offset(rng, config);
    const Eigen::Vector3d center2 = camera_offset(rng, config);
    const Eigen::Vector3d direction1 = random_unit_vector(rng);
    const double depth = uniform(rng, config.min_depth, config.max_depth);
    const Eigen::Vector3d point1 = center1 + depth * direction1;
    const Eigen::Vector3d point2 = r.transpose() * (point1 - t);
    const Eigen::Vector3d direction2 = (point2 - center2).normalized();

    RayCorrespondence corr;
    corr.line1 = PlueckerLine::through(
        center1, apply_pixel_noise(direction1, config.noise_sigma_px, config.focal_px, rng));
    corr.line2 = PlueckerLine::through(
        center2, apply_pixel_noise(direction2, config.noise_sigma_px, config.focal_px, rng));
    scene.corrs.push_back(corr);
  }
  return scene;
}

PoseErrors pose_errors(const Pose& ground_truth, const Pose& estimate) {
  return {(ground_truth.rotation - estimate.rotation).norm(),
          (ground_truth.translation - estimate.translation).norm()};
}

}  // namespace poseamm
