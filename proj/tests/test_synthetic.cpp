#include <cmath>
#include <numbers>

#include <Eigen/Geometry>
#include <gtest/gtest.h>

#include "poseamm/bench.hpp"
#include "poseamm/gec.hpp"
#include "poseamm/gpnp.hpp"
#include "poseamm/synthetic.hpp"
#include "poseamm/upnp.hpp"
#include "test_support.hpp"

namespace poseamm {
namespace {

TEST(SceneConfig, RejectsInvalidSettings) {
  SceneConfig config;
  EXPECT_NO_THROW(config.validate());
  config.num_correspondences = 0;
  EXPECT_THROW(config.validate(), InvalidArgument);
  config = {};
  config.noise_sigma_px = -1.0;
  EXPECT_THROW(generate_absolute_scene(config), InvalidArgument);
  config = {};
  config.min_depth = 9.0;
  EXPECT_THROW(generate_relative_scene(config), InvalidArgument);
}

TEST(Generators, SameSeedSameScene) {
  const SceneConfig config = test::scene_config(11, Rig::kNonCentral, 20, 3.0);
  const AbsoluteScene a = generate_absolute_scene(config);
  const AbsoluteScene b = generate_absolute_scene(config);
  EXPECT_EQ(a.ground_truth.rotation, b.ground_truth.rotation);
  for (std::size_t i = 0; i < a.corrs.size(); ++i) {
    EXPECT_EQ(a.corrs[i].point, b.corrs[i].point);
    EXPECT_EQ(a.corrs[i].ray.bearing, b.corrs[i].ray.bearing);
  }
  const RelativeScene c = generate_relative_scene(config);
  const RelativeScene d = generate_relative_scene(config);
  EXPECT_EQ(c.ground_truth.translation, d.ground_truth.translation);
  for (std::size_t i = 0; i < c.corrs.size(); ++i) {
    EXPECT_EQ(c.corrs[i].line2.moment, d.corrs[i].line2.moment);
  }
  const AbsoluteScene e = generate_absolute_scene(test::scene_config(12));
  EXPECT_NE(a.ground_truth.rotation, e.ground_truth.rotation);
}

TEST(Generators, NoiseFreeAbsoluteGeometry) {
  for (Rig rig : {Rig::kCentral, Rig::kNonCentral}) {
    const SceneConfig config = test::scene_config(13, rig, 50);
    const AbsoluteScene scene = generate_absolute_scene(config);
    const Pose& truth = scene.ground_truth;
    EXPECT_TRUE(truth.is_valid());
    EXPECT_LE(Eigen::AngleAxisd(truth.rotation).angle(), config.rotation_max_angle + 1e-12);
    EXPECT_LE(truth.translation.cwiseAbs().maxCoeff(), config.translation_extent);
    ASSERT_EQ(scene.corrs.size(), 50u);
    for (const auto& c : scene.corrs) {
      if (rig == Rig::kCentral) EXPECT_EQ(c.ray.offset, Eigen::Vector3d::Zero());
      EXPECT_LE(c.ray.offset.cwiseAbs().maxCoeff(), config.rig_extent);
      EXPECT_NEAR(c.ray.bearing.norm(), 1.0, 1e-15);
      const Eigen::Vector3d in_camera = truth.rotation * c.point + truth.translation;
      const double depth = (in_camera - c.ray.offset).norm();
      EXPECT_GE(depth, config.min_depth - 1e-12);
      EXPECT_LE(depth, config.max_depth + 1e-12);
      EXPECT_LT(gpnp_residual(c, truth.rotation, truth.translation).norm(), 1e-12);
    }
  }
}

TEST(Generators, NoiseFreeRelativeRaysIntersect) {
  const RelativeScene scene = generate_relative_scene(test::scene_config(14));
  const Pose& truth = scene.ground_truth;
  for (const auto& c : scene.corrs) {
    EXPECT_TRUE(c.line1.is_valid());
    EXPECT_TRUE(c.line2.is_valid());
    // Map ray 2 into frame 1 and check it meets ray 1.
    const Eigen::Vector3d d2 = truth.rotation * c.line2.direction;
    const Eigen::Vector3d p2 =
        truth.rotation * c.line2.direction.cross(c.line2.moment) + truth.translation;
    const Eigen::Vector3d p1 = c.line1.direction.cross(c.line1.moment);
    const Eigen::Vector3d n = c.line1.direction.cross(d2);
    EXPECT_LT(std::abs((p2 - p1).dot(n.normalized())), 1e-10);
  }
  const GecForm form = build_gec_form(scene.corrs);
  EXPECT_LT(gec_value(form, truth.rotation, truth.translation), 1e-18 * form.m.trace());
}

TEST(PixelNoise, ZeroSigmaKeepsBearing) {
  Rng rng(15);
  const Eigen::Vector3d b = Eigen::Vector3d(1, 2, 3).normalized();
  EXPECT_EQ(apply_pixel_noise(b, 0.0, 800.0, rng), b);
}

TEST(PixelNoise, AngularSpreadMatchesSigma) {
  // Two independent tangent offsets of sigma / f: the squared angle averages
  // 2 (sigma / f)^2 for small angles.
  Rng rng(16);
  const double sigma = 2.0, focal = 800.0;
  double sum_sq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector3d b = random_unit_vector(rng);
    const Eigen::Vector3d noisy = apply_pixel_noise(b, sigma, focal, rng);
    ASSERT_NEAR(noisy.norm(), 1.0, 1e-15);
    const double angle = std::atan2(b.cross(noisy).norm(), b.dot(noisy));
    sum_sq += angle * angle;
  }
  const double rms_per_axis = std::sqrt(sum_sq / n / 2.0);
  EXPECT_NEAR(rms_per_axis / (sigma / focal), 1.0, 0.05);
}

TEST(PoseErrors, KnownValues) {
  Rng rng(17);
  Pose a;
  a.rotation = test::random_rotation(rng);
  a.translation = test::random_vector(rng);
  EXPECT_EQ(pose_errors(a, a).rotation, 0.0);
  EXPECT_EQ(pose_errors(a, a).translation, 0.0);
  Pose b = a;
  b.rotation = Eigen::AngleAxisd(std::numbers::pi, test::random_vector(rng).normalized()) *
               a.rotation;
  EXPECT_NEAR(pose_errors(a, b).rotation, 2.0 * std::sqrt(2.0), 1e-12);
}

TEST(PoseErrors, MatchesElementwiseRecomputation) {
  Rng rng(18);
  for (int k = 0; k < 20; ++k) {
    Pose a, b;
    a.rotation = test::random_rotation(rng);
    b.rotation = test::random_rotation(rng);
    a.translation = test::random_vector(rng);
    b.translation = test::random_vector(rng);
    double rot = 0.0, trans = 0.0;
    for (int i = 0; i < 3; ++i) {
      trans += std::pow(a.translation(i) - b.translation(i), 2);
      for (int j = 0; j < 3; ++j) rot += std::pow(a.rotation(i, j) - b.rotation(i, j), 2);
    }
    EXPECT_NEAR(pose_errors(a, b).rotation, std::sqrt(rot), 1e-14);
    EXPECT_NEAR(pose_errors(a, b).translation, std::sqrt(trans), 1e-14);
  }
}

TEST(DeriveSeed, SeparatesStreams) {
  EXPECT_EQ(derive_seed(1, 2, 3), derive_seed(1, 2, 3));
  EXPECT_NE(derive_seed(1, 2, 3), derive_seed(1, 3, 2));
  EXPECT_NE(derive_seed(1, 2, 3), derive_seed(2, 2, 3));
  EXPECT_NE(trial_seed(0, 1.0, 0), trial_seed(0, 2.0, 0));
  EXPECT_EQ(trial_seed(0, 0.0, 4), trial_seed(0, -0.0, 4));
}

TEST(Names, RoundTrip) {
  for (Problem p : {Problem::kRelativeNonCentral, Problem::kAbsoluteCentral,
                    Problem::kAbsoluteNonCentral}) {
    EXPECT_EQ(parse_problem(problem_name(p)), p);
  }
  for (SolverKind s : {SolverKind::kAmmGec, SolverKind::kAmmGpnp, SolverKind::kAmmUpnp}) {
    EXPECT_EQ(parse_solver(solver_name(s)), s);
  }
  EXPECT_EQ(parse_init("identity"), InitKind::kIdentity);
  EXPECT_FALSE(parse_problem("planar").has_value());
  EXPECT_TRUE(solver_supports(SolverKind::kAmmGec, Problem::kRelativeNonCentral));
  EXPECT_FALSE(solver_supports(SolverKind::kAmmGec, Problem::kAbsoluteCentral));
  EXPECT_EQ(default_solvers(Problem::kAbsoluteNonCentral).size(), 2u);
}

TEST(Sweep, ZeroNoiseRowsAreExact) {
  for (Problem problem : {Problem::kRelativeNonCentral, Problem::kAbsoluteCentral,
                          Problem::kAbsoluteNonCentral}) {
    SweepConfig config;
    config.problem = problem;
    config.trials = 10;
    config.seed = 21;
    const std::vector<TrialRecord> rows = run_sweep(config);
    ASSERT_EQ(rows.size(), 10u * default_solvers(problem).size());
    for (const TrialRecord& r : rows) {
      EXPECT_FALSE(r.failed) << r.failure;
      EXPECT_TRUE(r.converged);
      EXPECT_LT(r.rot_err_frobenius, 1e-6);
      EXPECT_EQ(r.wall_time_ns, 0);
    }
  }
}

TEST(Sweep, RowOrderAndCount) {
  SweepConfig config;
  config.noise_levels = {0.0, 1.0, 2.0};
  config.trials = 4;
  const std::vector<TrialRecord> rows = run_sweep(config);
  ASSERT_EQ(rows.size(), 3u * 4u * 2u);
  std::size_t k = 0;
  for (double noise : config.noise_levels) {
    for (int trial = 0; trial < config.trials; ++trial) {
      for (const char* solver : {"amm-gpnp", "amm-upnp"}) {
        EXPECT_EQ(rows[k].noise_sigma, noise);
        EXPECT_EQ(rows[k].trial_index, trial);
        EXPECT_EQ(rows[k].solver_name, solver);
        ++k;
      }
    }
  }
}

TEST(Sweep, IndependentOfThreadCount) {
  SweepConfig config;
  config.problem = Problem::kRelativeNonCentral;
  config.noise_levels = {0.0, 4.0};
  config.trials = 6;
  config.threads = 1;
  const std::vector<TrialRecord> serial = run_sweep(config);
  config.threads = 4;
  const std::vector<TrialRecord> parallel = run_sweep(config);
  ASSERT_EQ(serial.size(), parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(serial[i].rot_err_frobenius, parallel[i].rot_err_frobenius);
    EXPECT_EQ(serial[i].final_objective, parallel[i].final_objective);
    EXPECT_EQ(serial[i].outer_iterations, parallel[i].outer_iterations);
  }
}

TEST(Sweep, TimingIsRecordedOnRequest) {
  SweepConfig config;
  config.trials = 3;
  config.record_timing = true;
  for (const TrialRecord& r : run_sweep(config)) EXPECT_GT(r.wall_time_ns, 0);
}

TEST(Sweep, FailuresBecomeRows) {
  SweepConfig config;
  config.problem = Problem::kRelativeNonCentral;
  config.scene.num_correspondences = 5;
  config.trials = 3;
  const std::vector<TrialRecord> rows = run_sweep(config);
  ASSERT_EQ(rows.size(), 3u);
  for (const TrialRecord& r : rows) {
    EXPECT_TRUE(r.failed);
    EXPECT_FALSE(r.converged);
    EXPECT_TRUE(std::isinf(r.rot_err_frobenius));
    EXPECT_NE(r.failure.find("17"), std::string::npos);
  }
}

TEST(Sweep, RejectsUnsupportedSolver) {
  SweepConfig config;
  config.solvers = {SolverKind::kAmmGec};
  EXPECT_THROW(run_sweep(config), InvalidArgument);
  config.solvers.clear();
  config.trials = -1;
  EXPECT_THROW(run_sweep(config), InvalidArgument);
}

TEST(Sweep, ErrorGrowsWithNoise) {
  SweepConfig config;
  config.problem = Problem::kAbsoluteNonCentral;
  config.noise_levels = {0.0, 10.0};
  config.trials = 200;
  const std::vector<LevelSummary> summary = summarize(run_sweep(config));
  ASSERT_EQ(summary.size(), 4u);
  for (int s = 0; s < 2; ++s) {
    EXPECT_GT(summary[2 + s].mean_rot_err, summary[s].mean_rot_err);
    EXPECT_GT(summary[2 + s].mean_trans_err, summary[s].mean_trans_err);
  }
}

TEST(Summarize, MeansSkipFailedRows) {
  std::vector<TrialRecord> rows(3);
  for (int i = 0; i < 3; ++i) {
    rows[i].solver_name = "amm-gpnp";
    rows[i].rot_err_frobenius = i + 1.0;
    rows[i].trans_err_norm = 2.0 * (i + 1.0);
    rows[i].outer_iterations = 4;
    rows[i].converged = i != 2;
  }
  rows[2].failed = true;
  rows[2].rot_err_frobenius = INFINITY;
  const std::vector<LevelSummary> summary = summarize(rows);
  ASSERT_EQ(summary.size(), 1u);
  EXPECT_EQ(summary[0].count, 2);
  EXPECT_DOUBLE_EQ(summary[0].mean_rot_err, 1.5);
  EXPECT_DOUBLE_EQ(summary[0].mean_trans_err, 3.0);
  EXPECT_DOUBLE_EQ(summary[0].mean_iterations, 4.0);
  EXPECT_DOUBLE_EQ(summary[0].converged_fraction, 2.0 / 3.0);
}

TEST(SolvePrepared, AbsoluteRejectsRelativeSolver) {
  const AbsoluteScene scene = generate_absolute_scene(test::scene_config(22));
  EXPECT_THROW(prepare_absolute(scene.corrs, SolverKind::kAmmGec, InitKind::kLinear),
               InvalidArgument);
}

TEST(SolvePrepared, CandidatesNeverWorsenTheObjective) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const RelativeScene scene =
        generate_relative_scene(test::scene_config(seed, Rig::kNonCentral, 20, 8.0));
    const PreparedProblem problem = prepare_relative(scene.corrs, InitKind::kLinear);
    SolveOptions single;
    single.try_all_candidates = false;
    const AmmResult one = solve_prepared(problem, single);
    const AmmResult best = solve_prepared(problem, SolveOptions{});
    EXPECT_LE(best.final_objective, one.final_objective);
  }
}

TEST(SolvePrepared, TranslationOverride) {
  const AbsoluteScene scene = generate_absolute_scene(test::scene_config(23));
  const PreparedProblem problem =
      prepare_absolute(scene.corrs, SolverKind::kAmmGpnp, InitKind::kIdentity);
  SolveOptions options;
  options.t0 = scene.ground_truth.translation;
  options.amm.max_outer_iters = 1;
  options.amm.max_rotation_iters = 1;
  options.amm.max_translation_iters = 1;
  const AmmResult result = solve_prepared(problem, options);
  const double at_truth_t = problem.objective->value(Eigen::Matrix3d::Identity(),
                                                     scene.ground_truth.translation);
  EXPECT_EQ(result.initial_objective, at_truth_t);
}

}  // namespace
}  // namespace poseamm
