#include "poseamm/bench.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <memory>
#include <thread>
#include <utility>

#include "poseamm/errors.hpp"
#include "poseamm/gec.hpp"
#include "poseamm/gpnp.hpp"
#include "poseamm/initializers.hpp"
#include "poseamm/upnp.hpp"

namespace poseamm {
namespace {

struct NamedProblem {
  Problem value;
  std::string_view name;
};
constexpr NamedProblem kProblems[] = {
    {Problem::kRelativeNonCentral, "relative-noncentral"},
    {Problem::kAbsoluteCentral, "absolute-central"},
    {Problem::kAbsoluteNonCentral, "absolute-noncentral"},
};

struct NamedSolver {
  SolverKind value;
  std::string_view name;
};
constexpr NamedSolver kSolvers[] = {
    {SolverKind::kAmmGec, "amm-gec"},
    {SolverKind::kAmmGpnp, "amm-gpnp"},
    {SolverKind::kAmmUpnp, "amm-upnp"},
};

struct SolveOutcome {
  AmmResult amm;
  std::int64_t elapsed_ns = 0;
};

template <typename Scene>
SolveOutcome run_solver(const SweepConfig& config, SolverKind solver, const Scene& scene) {
  PreparedProblem problem;
  if constexpr (std::is_same_v<Scene, RelativeScene>) {
    problem = prepare_relative(scene.corrs, config.init);
  } else {
    problem = prepare_absolute(scene.corrs, solver, config.init);
  }
  SolveOptions options;
  options.seed_rotation = config.seed_rotation;
  options.try_all_candidates = config.try_all_candidates;
  options.amm = config.amm;

  SolveOutcome out;
  const auto begin = std::chrono::steady_clock::now();
  out.amm = solve_prepared(problem, options);
  const auto end = std::chrono::steady_clock::now();
  out.elapsed_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(end - begin).count();
  return out;
}

bool nonincreasing(const std::vector<double>& trace, double start) {
  double prev = start;
  for (double f : trace) {
    if (f > prev + 1e-12) return false;
    prev = f;
  }
  return true;
}

}  // namespace

PreparedProblem prepare_relative(const std::vector<RayCorrespondence>& corrs, InitKind init) {
  PreparedProblem out;
  out.objective = std::make_unique<GecObjective>(corrs);
  out.start = init == InitKind::kLinear ? init_relative_17pt(corrs) : init_identity();
  out.relative = true;
  return out;
}

PreparedProblem prepare_absolute(const std::vector<PointRayCorrespondence>& corrs,
                                 SolverKind solver, InitKind init) {
  if (solver == SolverKind::kAmmGec) {
    throw InvalidArgument("amm-gec needs ray-to-ray correspondences");
  }
  QuadraticPoseForm form =
      solver == SolverKind::kAmmGpnp ? build_gpnp_form(corrs) : build_upnp_form(corrs);
  PreparedProblem out;
  out.start = init == InitKind::kLinear ? init_absolute_linear(form) : init_identity();
  out.objective = std::make_unique<QuadraticObjective>(std::move(form));
  return out;
}

AmmResult solve_prepared(const PreparedProblem& problem, const SolveOptions& options) {
  Pose start = problem.start;
  if (options.t0) start.translation = *options.t0;
  const std::vector<Pose> starts = problem.relative && options.try_all_candidates
                                       ? relative_pose_candidates(start)
                                       : std::vector<Pose>{start};
  std::optional<AmmResult> best;
  double max_orthogonality_error = 0.0;
  double min_determinant = 1.0;
  for (const Pose& s : starts) {
    std::optional<Eigen::Matrix3d> rotation_init;
    if (options.seed_rotation) rotation_init = s.rotation;
    AmmResult result = solve_amm(*problem.objective, s.translation, options.amm, rotation_init);
    max_orthogonality_error = std::max(max_orthogonality_error, result.max_orthogonality_error);
    min_determinant = std::min(min_determinant, result.min_determinant);
    if (!best || result.final_objective < best->final_objective) best = std::move(result);
  }
  // Diagnostics cover every run, not just the one kept.
  best->max_orthogonality_error = max_orthogonality_error;
  best->min_determinant = min_determinant;
  return *best;
}

std::string_view problem_name(Problem problem) {
  for (const auto& p : kProblems) {
    if (p.value == problem) return p.name;
  }
  return "unknown";
}

std::string_view solver_name(SolverKind solver) {
  for (const auto& s : kSolvers) {
    if (s.value == solver) return s.name;
  }
  return "unknown";
}

std::string_view init_name(InitKind init) {
  return init == InitKind::kLinear ? "linear" : "identity";
}

std::optional<Problem> parse_problem(std::string_view name) {
  for (const auto& p : kProblems) {
    if (p.name == name) return p.value;
  }
  return std::nullopt;
}

std::optional<SolverKind> parse_solver(std::string_view name) {
  for (const auto& s : kSolvers) {
    if (s.name == name) return s.value;
  }
  return std::nullopt;
}

std::optional<InitKind> parse_init(std::string_view name) {
  if (name == "linear") return InitKind::kLinear;
  if (name == "identity") return InitKind::kIdentity;
  return std::nullopt;
}

bool is_relative(Problem problem) { return problem == Problem::kRelativeNonCentral; }

bool solver_supports(SolverKind solver, Problem problem) {
  return (solver == SolverKind::kAmmGec) == is_relative(problem);
}

std::vector<SolverKind> default_solvers(Problem problem) {
  if (is_relative(problem)) return {SolverKind::kAmmGec};
  return {SolverKind::kAmmGpnp, SolverKind::kAmmUpnp};
}

std::uint64_t trial_seed(std::uint64_t seed, double noise_sigma, int trial_index) {
  return derive_seed(seed, std::bit_cast<std::uint64_t>(noise_sigma + 0.0),
                     static_cast<std::uint64_t>(trial_index));
}

std::vector<TrialRecord> run_trial(const SweepConfig& config, double noise_sigma,
                                   int trial_index) {
  SceneConfig scene_config = config.scene;
  scene_config.noise_sigma_px = noise_sigma;
  scene_config.seed = trial_seed(config.seed, noise_sigma, trial_index);
  scene_config.rig = config.problem == Problem::kAbsoluteCentral ? Rig::kCentral
                                                                 : Rig::kNonCentral;

  const std::vector<SolverKind> solvers =
      config.solvers.empty() ? default_solvers(config.problem) : config.solvers;

  std::optional<RelativeScene> relative;
  std::optional<AbsoluteScene> absolute;
  if (is_relative(config.problem)) {
    relative = generate_relative_scene(scene_config);
  } else {
    absolute = generate_absolute_scene(scene_config);
  }
  const Pose& truth = relative ? relative->ground_truth : absolute->ground_truth;

  std::vector<TrialRecord> rows;
  rows.reserve(solvers.size());
  for (SolverKind solver : solvers) {
    TrialRecord row;
    row.noise_sigma = noise_sigma;
    row.trial_index = trial_index;
    row.solver_name = std::string(solver_name(solver));
    try {
      if (!solver_supports(solver, config.problem)) {
        throw InvalidArgument(std::string(solver_name(solver)) + " cannot solve " +
                              std::string(problem_name(config.problem)));
      }
      const SolveOutcome outcome = relative ? run_solver(config, solver, *relative)
                                            : run_solver(config, solver, *absolute);
      const PoseErrors errors = pose_errors(truth, outcome.amm.pose);
      row.rot_err_frobenius = errors.rotation;
      row.trans_err_norm = errors.translation;
      row.wall_time_ns = config.record_timing ? outcome.elapsed_ns : 0;
      row.outer_iterations = outcome.amm.outer_iterations;
      row.final_objective = outcome.amm.final_objective;
      row.converged = outcome.amm.converged;
      row.max_orthogonality_error = outcome.amm.max_orthogonality_error;
      row.min_determinant = outcome.amm.min_determinant;
      row.trace_nonincreasing =
          nonincreasing(outcome.amm.objective_trace, outcome.amm.initial_objective);
    } catch (const std::exception& e) {
      const double inf = std::numeric_limits<double>::infinity();
      row.rot_err_frobenius = inf;
      row.trans_err_norm = inf;
      row.final_objective = inf;
      row.converged = false;
      row.failed = true;
      row.failure = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<TrialRecord> run_sweep(const SweepConfig& config) {
  if (config.trials < 0) throw InvalidArgument("run_sweep: negative trial count");
  config.amm.validate();
  config.scene.validate();
  for (SolverKind solver : config.solvers) {
    if (!solver_supports(solver, config.problem)) {
      throw InvalidArgument(std::string(solver_name(solver)) + " cannot solve " +
                            std::string(problem_name(config.problem)));
    }
  }

  const std::size_t levels = config.noise_levels.size();
  const std::size_t trials = static_cast<std::size_t>(config.trials);
  const std::size_t jobs = levels * trials;
  std::vector<std::vector<TrialRecord>> slots(jobs);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t job = next++; job < jobs; job = next++) {
      const std::size_t level = job / trials;
      const int trial = static_cast<int>(job % trials);
      slots[job] = run_trial(config, config.noise_levels[level], trial);
    }
  };

  unsigned threads = config.threads == 0 ? std::thread::hardware_concurrency() : config.threads;
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(jobs, 1))));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  std::vector<TrialRecord> records;
  records.reserve(jobs * std::max<std::size_t>(1, config.solvers.size()));
  for (auto& slot : slots) {
    for (auto& row : slot) records.push_back(std::move(row));
  }
  return records;
}

std::vector<LevelSummary> summarize(const std::vector<TrialRecord>& records) {
  std::vector<LevelSummary> out;
  std::vector<int> seen;  // rows contributing to each summary, including failures
  std::map<std::pair<double, std::string>, std::size_t> index;
  for (const TrialRecord& row : records) {
    const auto key = std::make_pair(row.noise_sigma, row.solver_name);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, out.size()).first;
      LevelSummary s;
      s.noise_sigma = row.noise_sigma;
      s.solver_name = row.solver_name;
      out.push_back(s);
      seen.push_back(0);
    }
    LevelSummary& s = out[it->second];
    ++seen[it->second];
    if (row.converged) s.converged_fraction += 1.0;
    if (row.failed || !std::isfinite(row.rot_err_frobenius)) continue;
    ++s.count;
    s.mean_rot_err += row.rot_err_frobenius;
    s.mean_trans_err += row.trans_err_norm;
    s.mean_time_ns += static_cast<double>(row.wall_time_ns);
    s.mean_iterations += row.outer_iterations;
    s.mean_final_objective += row.final_objective;
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    LevelSummary& s = out[i];
    s.converged_fraction /= seen[i];
    if (s.count == 0) continue;
    s.mean_rot_err /= s.count;
    s.mean_trans_err /= s.count;
    s.mean_time_ns /= s.count;
    s.mean_iterations /= s.count;
    s.mean_final_objective /= s.count;
  }
  return out;
}

}  // namespace poseamm
