#pragma once

#include <vector>

#include <Eigen/Core>

#include "poseamm/gpnp.hpp"
#include "poseamm/objective.hpp"

namespace poseamm {

// Depth rows of the left pseudo-inverse of the stacked ray system
//
//   A [alpha_1 .. alpha_N, t] = W b - w,   A = [blockdiag(v_i) | -I (stacked)],
//
// kept in the compact form implied by the arrow structure of A'A: with unit
// bearings, u_ij = delta_ij v_j' + (v_i' S^-1 v_j) v_j' - v_i' S^-1 where
// S = N I - sum v_i v_i' is the Schur complement of the depth block. The N x N
// grid of u_ij is never materialized unless dense_u() is called.
class UpnpFactorization {
 public:
  UpnpFactorization(std::vector<Eigen::Vector3d> unit_bearings,
                    const Eigen::Matrix3d& schur_inverse, double min_normal_eigenvalue)
      : bearings_(std::move(unit_bearings)),
        schur_inverse_(schur_inverse),
        min_normal_eigenvalue_(min_normal_eigenvalue) {}

  std::size_t size() const { return bearings_.size(); }
  const std::vector<Eigen::Vector3d>& bearings() const { return bearings_; }
  const Eigen::Matrix3d& schur_inverse() const { return schur_inverse_; }
  // Smallest eigenvalue of A'A.
  double min_normal_eigenvalue() const { return min_normal_eigenvalue_; }

  // The j-th 3-block of the i-th row of U.
  Eigen::RowVector3d u(std::size_t i, std::size_t j) const;
  // U as an N x 3N matrix.
  Eigen::MatrixXd dense_u() const;

 private:
  std::vector<Eigen::Vector3d> bearings_;
  Eigen::Matrix3d schur_inverse_;
  double min_normal_eigenvalue_;
};

// Bearings are normalized first, so depths are distances along unit rays.
// Throws EmptyData, InsufficientData (fewer than 3), or RankDeficientSystem
// when the smallest eigenvalue of A'A is below 1e-10.
UpnpFactorization build_upnp_factorization(const std::vector<PointRayCorrespondence>& corrs);

// alpha_i = sum_j u_ij (R p_j - c_j). Does not depend on t.
double upnp_depth(const UpnpFactorization& fact,
                  const std::vector<PointRayCorrespondence>& corrs, std::size_t i,
                  const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation);

// Quadratic form of sum_i |alpha_i(R) v_i + c_i - R p_i - t|^2.
QuadraticPoseForm build_upnp_form(const std::vector<PointRayCorrespondence>& corrs);

}  // namespace poseamm
