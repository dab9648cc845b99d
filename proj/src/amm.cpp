#include "poseamm/amm.hpp"

#include <algorithm>
#include <cmath>

#include "poseamm/errors.hpp"

namespace poseamm {
namespace {

constexpr double kMinStepAngle = 1e-16;
constexpr double kMinGradientDelta = 1e-16;
constexpr int kMaxBacktracks = 60;

double checked(double value, const char* where) {
  if (!std::isfinite(value)) {
    throw NonFiniteObjective(std::string(where) + ": objective is not finite");
  }
  return value;
}

}  // namespace

void AmmConfig::validate() const {
  if (!(tol_outer > 0) || !(tol_rotation > 0) || !(tol_translation > 0)) {
    throw InvalidArgument("AmmConfig: tolerances must be positive");
  }
  if (!(initial_mu > 0) || !(initial_alpha > 0) || !(max_mu > 0)) {
    throw InvalidArgument("AmmConfig: initial steps must be positive");
  }
  if (max_outer_iters < 1 || max_rotation_iters < 1 || max_translation_iters < 1 ||
      reproject_every < 1) {
    throw InvalidArgument("AmmConfig: iteration caps must be at least 1");
  }
}

RotationSolveResult rotation_subsolve(const ObjectiveFunction& objective,
                                      const Eigen::Matrix3d& rotation_init,
                                      const Eigen::Vector3d& translation_fixed,
                                      const AmmConfig& config) {
  const Eigen::Vector3d& t = translation_fixed;
  auto g = [&](const Eigen::Matrix3d& r) {
    return checked(objective.value(r, t), "rotation_subsolve");
  };

  RotationSolveResult out;
  Eigen::Matrix3d x = rotation_init;
  double g_x = g(x);
  double mu = config.initial_mu;

  auto track = [&out](const Eigen::Matrix3d& r) {
    out.max_orthogonality_error =
        std::max(out.max_orthogonality_error, orthogonality_error(r));
    out.min_determinant = std::min(out.min_determinant, r.determinant());
  };
  track(x);

  for (int k = 0; k < config.max_rotation_iters; ++k) {
    const Eigen::Matrix3d grad = objective.rotation_gradient(x, t);
    if (!grad.allFinite()) {
      throw NonFiniteObjective("rotation_subsolve: gradient is not finite");
    }
    // Riemannian gradient; the step exp(mu Z^T) descends at rate z.
    const Eigen::Matrix3d z_mat = grad * x.transpose() - x * grad.transpose();
    const double z = 0.5 * z_mat.squaredNorm();
    if (!(z > 0.0)) break;
    const Eigen::Vector3d axis = unskew(z_mat.transpose());

    // Double the angle while twice the step still gives a large decrease.
    Eigen::Matrix3d step = rodrigues_step(axis, mu);
    double g_double = g(rodrigues_step(axis, 2.0 * mu) * x);
    while (g_x - g_double >= mu * z && mu < config.max_mu) {
      mu *= 2.0;
      step = rodrigues_step(axis, mu);
      g_double = g(rodrigues_step(axis, 2.0 * mu) * x);
    }

    // Halve until the single step gives sufficient decrease.
    double g_step = g(step * x);
    bool collapsed = false;
    while (g_x - g_step < 0.5 * mu * z) {
      mu *= 0.5;
      if (mu < kMinStepAngle) {
        collapsed = true;
        break;
      }
      step = rodrigues_step(axis, mu);
      g_step = g(step * x);
    }
    if (collapsed) {
      out.step_collapsed = true;
      break;
    }

    Eigen::Matrix3d x_next = step * x;
    ++out.iterations;
    if (out.iterations % config.reproject_every == 0) {
      x_next = project_to_so3(x_next);
      g_step = g(x_next);
    }
    const double delta = (x_next - x).norm();
    x = x_next;
    g_x = g_step;
    track(x);
    if (delta < config.tol_rotation) break;
  }

  out.rotation = x;
  out.objective = g_x;
  return out;
}

TranslationSolveResult translation_subsolve(const ObjectiveFunction& objective,
                                            const Eigen::Vector3d& translation_init,
                                            const Eigen::Matrix3d& rotation_fixed,
                                            const AmmConfig& config) {
  const Eigen::Matrix3d& r = rotation_fixed;
  auto h = [&](const Eigen::Vector3d& t) {
    return checked(objective.value(r, t), "translation_subsolve");
  };
  auto grad = [&](const Eigen::Vector3d& t) {
    Eigen::Vector3d g = objective.translation_gradient(r, t);
    if (!g.allFinite()) {
      throw NonFiniteObjective("translation_subsolve: gradient is not finite");
    }
    return g;
  };

  TranslationSolveResult out;
  Eigen::Vector3d x = translation_init;
  double h_x = h(x);
  Eigen::Vector3d g_x = grad(x);
  double alpha = config.initial_alpha;

  for (int k = 0; k < config.max_translation_iters; ++k) {
    if (g_x.isZero(0.0)) break;
    Eigen::Vector3d x_next = x - alpha * g_x;
    double h_next = h(x_next);
    if (config.translation_backtracking) {
      for (int b = 0; h_next > h_x && b < kMaxBacktracks; ++b) {
        alpha *= 0.5;
        x_next = x - alpha * g_x;
        h_next = h(x_next);
      }
    }
    if (h_next > h_x) {
      out.stopped_on_increase = true;
      break;
    }
    const Eigen::Vector3d g_next = grad(x_next);
    const Eigen::Vector3d dx = x_next - x;
    const Eigen::Vector3d dg = g_next - g_x;
    const double delta = std::abs(h_next - h_x);
    x = x_next;
    h_x = h_next;
    g_x = g_next;
    ++out.iterations;

    const double dg_sq = dg.squaredNorm();
    if (std::sqrt(dg_sq) < kMinGradientDelta) {
      out.zero_gradient_delta = true;
      break;
    }
    alpha = dx.dot(dg) / dg_sq;
    if (delta < config.tol_translation) break;
  }

  out.translation = x;
  out.objective = h_x;
  return out;
}

AmmResult solve_amm(const ObjectiveFunction& objective,
                    const Eigen::Vector3d& translation_init, const AmmConfig& config,
                    const std::optional<Eigen::Matrix3d>& rotation_init) {
  config.validate();
  if (!translation_init.allFinite()) {
    throw InvalidArgument("solve_amm: initial translation is not finite");
  }

  AmmResult out;
  Eigen::Matrix3d r = rotation_init.value_or(Eigen::Matrix3d::Identity());
  Eigen::Vector3d t = translation_init;
  double f_prev = checked(objective.value(r, t), "solve_amm");
  out.initial_objective = f_prev;

  for (int k = 1; k <= config.max_outer_iters; ++k) {
    const RotationSolveResult rot = rotation_subsolve(objective, r, t, config);
    r = rot.rotation;
    out.max_orthogonality_error =
        std::max(out.max_orthogonality_error, rot.max_orthogonality_error);
    out.min_determinant = std::min(out.min_determinant, rot.min_determinant);
    if (rot.step_collapsed) ++out.step_collapses;

    std::optional<Eigen::Vector3d> exact;
    if (config.use_closed_form_translation) exact = objective.minimize_translation(r);
    if (exact && exact->allFinite() &&
        checked(objective.value(r, *exact), "solve_amm") <= rot.objective) {
      t = *exact;
    } else {
      t = translation_subsolve(objective, t, r, config).translation;
    }

    const double f = checked(objective.value(r, t), "solve_amm");
    out.objective_trace.push_back(f);
    out.outer_iterations = k;
    if (std::abs(f - f_prev) < config.tol_outer) {
      out.converged = true;
      break;
    }
    f_prev = f;
  }

  out.pose.rotation = r;
  out.pose.translation = t;
  out.final_objective = out.objective_trace.back();
  return out;
}

}  // namespace poseamm
