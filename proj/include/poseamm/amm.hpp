#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "poseamm/geometry.hpp"
#include "poseamm/objective.hpp"

namespace poseamm {

struct AmmConfig {
  // Outer loop stops once |F_k - F_{k-1}| < tol_outer.
  double tol_outer = 1e-9;
  int max_outer_iters = 100;
  // Rotation sub-solver stops once the Frobenius step is below this.
  double tol_rotation = 1e-8;
  // Translation sub-solver stops once |h(x_{k+1}) - h(x_k)| is below this.
  double tol_translation = 1e-10;
  double initial_mu = 1.0;
  double initial_alpha = 1e-3;
  bool use_closed_form_translation = false;
  // A BB step that increases h is retried with the step halved (up to 60
  // times) before the translation solve gives up and returns the previous
  // iterate. Without this the solve stops at the first increase, which on
  // anisotropic Mtt usually happens well before the minimizer.
  bool translation_backtracking = true;

  int max_rotation_iters = 1000;
  int max_translation_iters = 1000;
  // Iterates are re-orthogonalized this often to absorb rounding drift.
  int reproject_every = 50;
  // Upper bound on the manifold step angle multiplier during doubling.
  double max_mu = 1e6;

  // Throws InvalidArgument when a tolerance is not positive or a cap is < 1.
  void validate() const;
};

struct RotationSolveResult {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  double objective = 0.0;
  int iterations = 0;
  // Set when the step angle underflowed without meeting the sufficient
  // decrease test; `rotation` is then the best iterate found.
  bool step_collapsed = false;
  double max_orthogonality_error = 0.0;
  double min_determinant = 1.0;
};

struct TranslationSolveResult {
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  double objective = 0.0;
  int iterations = 0;
  // The gradient stopped changing between iterates; treated as converged.
  bool zero_gradient_delta = false;
  // A step increased h (after any backtracking); the previous iterate was
  // returned.
  bool stopped_on_increase = false;
};

struct AmmResult {
  Pose pose;
  // F at the starting pose, before the first rotation solve.
  double initial_objective = 0.0;
  double final_objective = 0.0;
  int outer_iterations = 0;
  // False iff the outer iteration cap ended the solve.
  bool converged = false;
  std::vector<double> objective_trace;

  // Manifold diagnostics over every accepted rotation iterate.
  double max_orthogonality_error = 0.0;
  double min_determinant = 1.0;
  int step_collapses = 0;
};

// Steepest descent on SO(3) for g(R) = F(R, t_fixed) with the doubling /
// halving step-angle schedule. Never returns a rotation with a larger g.
RotationSolveResult rotation_subsolve(const ObjectiveFunction& objective,
                                      const Eigen::Matrix3d& rotation_init,
                                      const Eigen::Vector3d& translation_fixed,
                                      const AmmConfig& config = {});

// Gradient descent with Barzilai-Borwein step lengths for h(t) = F(R_fixed, t).
TranslationSolveResult translation_subsolve(const ObjectiveFunction& objective,
                                            const Eigen::Vector3d& translation_init,
                                            const Eigen::Matrix3d& rotation_fixed,
                                            const AmmConfig& config = {});

// Alternates the two sub-solvers starting from (rotation_init or I, t0).
// Throws NonFiniteObjective if any evaluation is NaN or infinite.
AmmResult solve_amm(const ObjectiveFunction& objective,
                    const Eigen::Vector3d& translation_init,
                    const AmmConfig& config = {},
                    const std::optional<Eigen::Matrix3d>& rotation_init = std::nullopt);

}  // namespace poseamm
