#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "poseamm/amm.hpp"
#include "poseamm/gec.hpp"
#include "poseamm/gpnp.hpp"
#include "poseamm/synthetic.hpp"

namespace poseamm {

enum class Problem { kRelativeNonCentral, kAbsoluteCentral, kAbsoluteNonCentral };
enum class SolverKind { kAmmGec, kAmmGpnp, kAmmUpnp };
enum class InitKind { kLinear, kIdentity };

std::string_view problem_name(Problem problem);
std::string_view solver_name(SolverKind solver);
std::string_view init_name(InitKind init);
std::optional<Problem> parse_problem(std::string_view name);
std::optional<SolverKind> parse_solver(std::string_view name);
std::optional<InitKind> parse_init(std::string_view name);

bool is_relative(Problem problem);
bool solver_supports(SolverKind solver, Problem problem);
std::vector<SolverKind> default_solvers(Problem problem);

// Objective plus starting pose for one solve.
struct PreparedProblem {
  std::unique_ptr<ObjectiveFunction> objective;
  Pose start;
  bool relative = false;
};

PreparedProblem prepare_relative(const std::vector<RayCorrespondence>& corrs, InitKind init);
// solver must be amm-gpnp or amm-upnp.
PreparedProblem prepare_absolute(const std::vector<PointRayCorrespondence>& corrs,
                                 SolverKind solver, InitKind init);

struct SolveOptions {
  // Hand the initializer's rotation to the solver too. When false only the
  // translation is seeded and the rotation starts at the identity.
  bool seed_rotation = true;
  // Relative problems: solve from every relative_pose_candidates() entry of
  // the start and keep the lowest final objective. The linear start is only
  // determined up to this ambiguity once noise swamps the rig baseline.
  bool try_all_candidates = true;
  // Replaces the initializer's translation when set.
  std::optional<Eigen::Vector3d> t0;
  AmmConfig amm;
};

// The returned result is the kept run's, except that the manifold
// diagnostics cover every run. Throws whatever solve_amm throws.
AmmResult solve_prepared(const PreparedProblem& problem, const SolveOptions& options);

struct TrialRecord {
  double noise_sigma = 0.0;
  int trial_index = 0;
  std::string solver_name;
  double rot_err_frobenius = 0.0;
  double trans_err_norm = 0.0;
  // Zero unless timing was requested.
  std::int64_t wall_time_ns = 0;
  int outer_iterations = 0;
  double final_objective = 0.0;
  bool converged = false;

  // Not serialized. A failed trial has infinite errors and objective.
  bool failed = false;
  std::string failure;
  bool trace_nonincreasing = true;
  double max_orthogonality_error = 0.0;
  double min_determinant = 1.0;
};

struct SweepConfig {
  Problem problem = Problem::kAbsoluteCentral;
  // Noise level and seed are overridden per trial.
  SceneConfig scene;
  std::vector<double> noise_levels = {0.0};
  int trials = 200;
  std::vector<SolverKind> solvers;  // empty: every solver for the problem
  InitKind init = InitKind::kLinear;
  // See SolveOptions.
  bool seed_rotation = true;
  bool try_all_candidates = true;
  AmmConfig amm;
  std::uint64_t seed = 0;
  bool record_timing = false;
  // 0 picks the hardware concurrency.
  unsigned threads = 1;
};

// Rows are ordered by noise level, then trial, then solver, regardless of
// how many threads ran them. Each trial's scene is drawn from a seed derived
// from (seed, noise level, trial index).
std::vector<TrialRecord> run_sweep(const SweepConfig& config);

// One trial: generate the scene for (noise level, trial) and run every
// requested solver on it.
std::vector<TrialRecord> run_trial(const SweepConfig& config, double noise_sigma,
                                   int trial_index);

std::uint64_t trial_seed(std::uint64_t seed, double noise_sigma, int trial_index);

struct LevelSummary {
  double noise_sigma = 0.0;
  std::string solver_name;
  double mean_rot_err = 0.0;
  double mean_trans_err = 0.0;
  double mean_time_ns = 0.0;
  double mean_iterations = 0.0;
  double mean_final_objective = 0.0;
  double converged_fraction = 0.0;
  int count = 0;  // trials that did not fail
};

// Means per (noise level, solver) over non-failed rows, in first-seen order.
std::vector<LevelSummary> summarize(const std::vector<TrialRecord>& records);

}  // namespace poseamm
