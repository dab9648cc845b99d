#include <gtest/gtest.h>

#include "poseamm/upnp.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace poseamm {
namespace {

using test::random_point_rays;
using test::random_rotation;
using test::random_vector;
using test::relative_error;

TEST(UpnpFactorization, OrthogonalBearingsAtDistinctCenters) {
  std::vector<PointRayCorrespondence> corrs(3);
  for (int i = 0; i < 3; ++i) {
    corrs[i].ray.bearing = Eigen::Vector3d::Unit(i);
    corrs[i].ray.offset = Eigen::Vector3d::Unit((i + 1) % 3);
  }
  const UpnpFactorization fact = build_upnp_factorization(corrs);
  EXPECT_EQ(fact.size(), 3u);
  EXPECT_GT(fact.min_normal_eigenvalue(), 1e-10);
}

TEST(UpnpFactorization, DegenerateInputs) {
  EXPECT_THROW(build_upnp_factorization({}), EmptyData);
  Rng rng(1);
  EXPECT_THROW(build_upnp_factorization(random_point_rays(rng, 2)), InsufficientData);
  auto same = random_point_rays(rng, 5);
  for (auto& c : same) c.ray = same.front().ray;
  EXPECT_THROW(build_upnp_factorization(same), RankDeficientSystem);
  EXPECT_THROW(build_upnp_form(same), RankDeficientSystem);
}

TEST(UpnpFactorization, MatchesDensePseudoInverse) {
  Rng rng(2);
  for (int k = 0; k < 20; ++k) {
    const auto corrs = random_point_rays(rng, 8);
    const Eigen::MatrixXd a = oracle::upnp_stacked_system(corrs);
    const auto n = static_cast<Eigen::Index>(corrs.size());
    const Eigen::MatrixXd ata = a.transpose() * a;
    const Eigen::MatrixXd pinv = ata.colPivHouseholderQr().solve(a.transpose());
    const Eigen::MatrixXd u = build_upnp_factorization(corrs).dense_u();
    EXPECT_LT((u - pinv.topRows(n)).norm(), 1e-10 * pinv.norm());

    // U recovers the depths exactly and annihilates the translation columns.
    const Eigen::MatrixXd ua = u * a;
    EXPECT_LT((ua.leftCols(n) - Eigen::MatrixXd::Identity(n, n)).norm(), 1e-10);
    EXPECT_LT(ua.rightCols(3).norm(), 1e-10);
  }
}

TEST(UpnpFactorization, BlocksSumToZeroOverColumns) {
  Rng rng(3);
  const auto corrs = random_point_rays(rng, 10);
  const UpnpFactorization fact = build_upnp_factorization(corrs);
  for (std::size_t i = 0; i < fact.size(); ++i) {
    Eigen::RowVector3d sum = Eigen::RowVector3d::Zero();
    for (std::size_t j = 0; j < fact.size(); ++j) sum += fact.u(i, j);
    EXPECT_LT(sum.norm(), 1e-12);
  }
}

TEST(UpnpDepth, MatchesDenseSolution) {
  Rng rng(4);
  for (int k = 0; k < 20; ++k) {
    const auto corrs = random_point_rays(rng, 12);
    const UpnpFactorization fact = build_upnp_factorization(corrs);
    const Eigen::Matrix3d r = random_rotation(rng);
    const Eigen::VectorXd x = oracle::upnp_dense_solution(corrs, r);
    for (std::size_t i = 0; i < corrs.size(); ++i) {
      const double alpha = upnp_depth(fact, corrs, i, r, random_vector(rng));
      EXPECT_NEAR(alpha, x(i), 1e-10 * (1.0 + std::abs(x(i))));
    }
  }
}

TEST(UpnpDepth, TrueDepthsOnNoiseFreeData) {
  for (Rig rig : {Rig::kCentral, Rig::kNonCentral}) {
    const AbsoluteScene scene = generate_absolute_scene(test::scene_config(5, rig));
    const Pose& truth = scene.ground_truth;
    const UpnpFactorization fact = build_upnp_factorization(scene.corrs);
    for (std::size_t i = 0; i < scene.corrs.size(); ++i) {
      const auto& c = scene.corrs[i];
      const double depth = (truth.rotation * c.point + truth.translation - c.ray.offset).norm();
      EXPECT_NEAR(upnp_depth(fact, scene.corrs, i, truth.rotation, truth.translation), depth,
                  1e-9);
    }
  }
}

TEST(UpnpDepth, CentralPointAlongBearing) {
  std::vector<PointRayCorrespondence> corrs(3);
  const double d[3] = {2.0, 3.5, 7.0};
  for (int i = 0; i < 3; ++i) {
    corrs[i].ray.bearing = Eigen::Vector3d::Unit(i) + Eigen::Vector3d(0.1, 0.2, 0.3);
    corrs[i].point = d[i] * corrs[i].ray.bearing.normalized();
  }
  const UpnpFactorization fact = build_upnp_factorization(corrs);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(upnp_depth(fact, corrs, i, Eigen::Matrix3d::Identity(), Eigen::Vector3d::Zero()),
                d[i], 1e-12);
  }
}

TEST(UpnpForm, TranslationBlockIsScaledIdentity) {
  Rng rng(6);
  const auto corrs = random_point_rays(rng, 17);
  EXPECT_EQ(build_upnp_form(corrs).m_tt, Eigen::Matrix3d(17.0 * Eigen::Matrix3d::Identity()));
}

TEST(UpnpForm, MatchesResidualRecomposition) {
  Rng rng(7);
  for (int k = 0; k < 100; ++k) {
    const auto corrs = random_point_rays(rng, 20);
    const QuadraticPoseForm form = build_upnp_form(corrs);
    EXPECT_TRUE(form.is_valid());
    const Eigen::Matrix3d r = random_rotation(rng);
    const Eigen::Vector3d t = random_vector(rng, 2.0);
    EXPECT_LT(relative_error(quadratic_value(form, r, t), oracle::upnp_value(corrs, r, t)), 1e-9);
  }
}

TEST(UpnpForm, ZeroAtTruthOnNoiseFreeData) {
  for (Rig rig : {Rig::kCentral, Rig::kNonCentral}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const AbsoluteScene scene = generate_absolute_scene(test::scene_config(seed, rig));
      const QuadraticPoseForm form = build_upnp_form(scene.corrs);
      const double scale = form.m_rr.norm() + form.m_tt.norm() + std::abs(form.c);
      EXPECT_LT(std::abs(quadratic_value(form, scene.ground_truth.rotation,
                                         scene.ground_truth.translation)),
                1e-12 * scale);
    }
  }
}

TEST(UpnpForm, GradientsMatchFiniteDifferences) {
  Rng rng(8);
  for (int k = 0; k < 100; ++k) {
    const QuadraticObjective f(build_upnp_form(random_point_rays(rng, 20)));
    const Eigen::Matrix3d r = random_rotation(rng);
    const Eigen::Vector3d t = random_vector(rng, 2.0);
    EXPECT_LT(relative_error(f.rotation_gradient(r, t), test::numeric_rotation_gradient(f, r, t)),
              1e-5);
    EXPECT_LT(
        relative_error(f.translation_gradient(r, t), test::numeric_translation_gradient(f, r, t)),
        1e-5);
  }
}

}  // namespace
}  // namespace poseamm
