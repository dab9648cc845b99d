#include "poseamm/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "poseamm/bench.hpp"
#include "poseamm/errors.hpp"
#include "poseamm/io.hpp"

namespace poseamm {
namespace {

double parse_real(std::string_view text, std::string_view what) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  const auto result = std::from_chars(text.data(), end, value);
  if (result.ec != std::errc() || result.ptr != end || !std::isfinite(value)) {
    throw InvalidArgument("bad " + std::string(what) + ": '" + std::string(text) + "'");
  }
  return value;
}

Eigen::Vector3d parse_vector3(std::string_view text) {
  Eigen::Vector3d v;
  for (int i = 0; i < 3; ++i) {
    const auto comma = text.find(',');
    if ((i < 2) == (comma == std::string_view::npos)) {
      throw InvalidArgument("--t0 expects x,y,z");
    }
    v[i] = parse_real(text.substr(0, comma), "--t0 component");
    if (i < 2) text.remove_prefix(comma + 1);
  }
  return v;
}

unsigned thread_count() {
  const char* env = std::getenv("POSEAMM_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  unsigned value = 0;
  const std::string_view text(env);
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc() || result.ptr != text.data() + text.size()) {
    throw InvalidArgument("POSEAMM_THREADS must be a non-negative integer");
  }
  return value;
}

struct AmmFlags {
  double tol = AmmConfig{}.tol_outer;
  int max_iters = AmmConfig{}.max_outer_iters;
  bool closed_form_t = false;
  bool t0_only = false;
  bool single_start = false;
  std::string init = "linear";

  void add_to(CLI::App& app) {
    app.add_option("--tol", tol, "outer objective-change tolerance");
    app.add_option("--max-iters", max_iters, "outer iteration cap");
    app.add_flag("--closed-form-t", closed_form_t,
                 "use the exact translation minimizer when it is available");
    app.add_flag("--t0-only", t0_only,
                 "seed only the translation; the rotation starts at the identity");
    app.add_flag("--single-start", single_start,
                 "relative problems: do not retry from the other decompositions of the start");
    app.add_option("--init", init, "linear | identity");
  }

  AmmConfig config() const {
    AmmConfig c;
    c.tol_outer = tol;
    c.max_outer_iters = max_iters;
    c.use_closed_form_translation = closed_form_t;
    c.validate();
    return c;
  }

  InitKind init_kind() const {
    const auto kind = parse_init(init);
    if (!kind) throw InvalidArgument("unknown --init '" + init + "'");
    return *kind;
  }
};

Problem problem_or_throw(const std::string& name) {
  const auto problem = parse_problem(name);
  if (!problem) throw InvalidArgument("unknown problem '" + name + "'");
  return *problem;
}

struct BenchArgs {
  std::string problem;
  int trials = 200;
  std::string noise = "0:1:10";
  int points = 20;
  std::uint64_t seed = 0;
  std::vector<std::string> solvers;
  AmmFlags amm;
  bool summary = false;
  bool timing = false;
  std::string out_path;
};

int cmd_bench(const BenchArgs& args, const std::string& usage, std::ostream& out,
              std::ostream& err) {
  SweepConfig config;
  try {
    config.problem = problem_or_throw(args.problem);
    config.noise_levels = parse_noise_grid(args.noise);
    config.trials = args.trials;
    if (args.trials < 1) throw InvalidArgument("--trials must be at least 1");
    config.scene.num_correspondences = args.points;
    config.seed = args.seed;
    for (const std::string& name : args.solvers) {
      const auto solver = parse_solver(name);
      if (!solver) throw InvalidArgument("unknown solver '" + name + "'");
      if (!solver_supports(*solver, config.problem)) {
        throw InvalidArgument(name + " cannot solve " + args.problem);
      }
      config.solvers.push_back(*solver);
    }
    config.init = args.amm.init_kind();
    config.seed_rotation = !args.amm.t0_only;
    config.try_all_candidates = !args.amm.single_start;
    config.amm = args.amm.config();
    config.record_timing = args.timing;
    config.threads = thread_count();
    config.scene.validate();
  } catch (const PoseError& e) {
    err << "error: " << e.what() << "\n\n" << usage;
    return kExitUsage;
  }

  const std::vector<TrialRecord> records = run_sweep(config);
  const std::vector<LevelSummary> summaries =
      args.summary ? summarize(records) : std::vector<LevelSummary>{};

  if (args.out_path.empty()) {
    write_sweep_csv(out, records, summaries);
  } else {
    std::ofstream file(args.out_path);
    if (!file) {
      err << "error: cannot write " << args.out_path << '\n';
      return kExitFailure;
    }
    write_sweep_csv(file, records, summaries);
  }

  std::size_t failed = 0;
  const TrialRecord* first_failure = nullptr;
  for (const TrialRecord& r : records) {
    if (!r.failed) continue;
    if (failed++ == 0) first_failure = &r;
  }
  if (first_failure != nullptr) {
    err << failed << " of " << records.size() << " solves failed; first (noise "
        << first_failure->noise_sigma << ", trial " << first_failure->trial_index << ", "
        << first_failure->solver_name << "): " << first_failure->failure << '\n';
  }
  return !records.empty() && failed == records.size() ? kExitFailure : kExitOk;
}

struct SolveArgs {
  std::string input;
  std::string solver;
  std::string t0;
  AmmFlags amm;
};

int cmd_solve(const SolveArgs& args, const std::string& usage, std::ostream& out,
              std::ostream& err) {
  CorrespondenceSet set;
  SolverKind solver{};
  SolveOptions options;
  InitKind init{};
  try {
    const auto kind = parse_solver(args.solver);
    if (!kind) throw InvalidArgument("unknown solver '" + args.solver + "'");
    solver = *kind;
    init = args.amm.init_kind();
    options.amm = args.amm.config();
    options.seed_rotation = !args.amm.t0_only;
    options.try_all_candidates = !args.amm.single_start;
    if (!args.t0.empty()) options.t0 = parse_vector3(args.t0);

    set = parse_correspondence_file(args.input);
    const bool relative_file = set.kind == CorrespondenceKind::kRelative;
    if (relative_file != (solver == SolverKind::kAmmGec)) {
      throw InvalidArgument(std::string(solver_name(solver)) + " cannot solve a " +
                            (relative_file ? "relative" : "absolute") + " file");
    }
  } catch (const LineError& e) {
    err << args.input << ": " << e.kind() << " at " << e.what() << '\n';
    return kExitUsage;
  } catch (const PoseError& e) {
    err << "error: " << e.what() << "\n\n" << usage;
    return kExitUsage;
  }

  AmmResult result;
  try {
    const PreparedProblem problem = set.kind == CorrespondenceKind::kRelative
                                        ? prepare_relative(set.relative, init)
                                        : prepare_absolute(set.absolute, solver, init);
    result = solve_prepared(problem, options);
  } catch (const PoseError& e) {
    err << "error: " << e.kind() << ": " << e.what() << '\n';
    return kExitFailure;
  }

  const Pose& pose = result.pose;
  out << "rotation";
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) out << ' ' << format_real(pose.rotation(i, j));
  }
  out << "\ntranslation";
  for (int i = 0; i < 3; ++i) out << ' ' << format_real(pose.translation[i]);
  out << "\nobjective " << format_real(result.final_objective)
      << "\niterations " << result.outer_iterations
      << "\nconverged " << (result.converged ? 1 : 0) << '\n';
  return kExitOk;
}

struct GenerateArgs {
  std::string problem;
  int points = 20;
  double noise = 0.0;
  std::uint64_t seed = 0;
  std::string out_path;
};

int cmd_generate(const GenerateArgs& args, const std::string& usage, std::ostream& out,
                 std::ostream& err) {
  SceneConfig scene;
  Problem problem{};
  try {
    problem = problem_or_throw(args.problem);
    scene.num_correspondences = args.points;
    scene.noise_sigma_px = args.noise;
    scene.seed = args.seed;
    scene.rig = problem == Problem::kAbsoluteCentral ? Rig::kCentral : Rig::kNonCentral;
    scene.validate();
  } catch (const PoseError& e) {
    err << "error: " << e.what() << "\n\n" << usage;
    return kExitUsage;
  }

  CorrespondenceSet set;
  Pose truth;
  if (is_relative(problem)) {
    RelativeScene generated = generate_relative_scene(scene);
    set.kind = CorrespondenceKind::kRelative;
    set.relative = std::move(generated.corrs);
    truth = generated.ground_truth;
  } else {
    AbsoluteScene generated = generate_absolute_scene(scene);
    set.kind = CorrespondenceKind::kAbsolute;
    set.absolute = std::move(generated.corrs);
    truth = generated.ground_truth;
  }

  if (args.out_path.empty()) {
    write_correspondences(out, set, truth);
    return kExitOk;
  }
  std::ofstream file(args.out_path);
  if (!file) {
    err << "error: cannot write " << args.out_path << '\n';
    return kExitFailure;
  }
  write_correspondences(file, set, truth);
  return kExitOk;
}

}  // namespace

std::vector<double> parse_noise_grid(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (true) {
    const auto colon = text.find(':', pos);
    parts.push_back(text.substr(pos, colon == std::string_view::npos ? colon : colon - pos));
    if (colon == std::string_view::npos) break;
    pos = colon + 1;
  }
  if (parts.size() == 1) {
    const double v = parse_real(parts[0], "noise level");
    if (v < 0) throw InvalidArgument("noise levels must be non-negative");
    return {v};
  }
  if (parts.size() != 3) throw InvalidArgument("noise grid must be min:step:max");
  const double lo = parse_real(parts[0], "noise minimum");
  const double step = parse_real(parts[1], "noise step");
  const double hi = parse_real(parts[2], "noise maximum");
  if (lo < 0 || hi < lo) throw InvalidArgument("noise grid needs 0 <= min <= max");
  if (hi > lo && !(step > 0)) throw InvalidArgument("noise step must be positive");

  std::vector<double> levels;
  const double slack = 1e-9 * std::max(1.0, std::abs(hi));
  for (int k = 0;; ++k) {
    const double v = lo + k * step;
    if (v > hi + slack || (k > 0 && hi == lo)) break;
    levels.push_back(std::min(v, hi));
  }
  return levels;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Alternating-minimization pose solvers and benchmark sweeps", "poseamm"};
  app.require_subcommand(1);

  BenchArgs bench;
  CLI::App* bench_cmd = app.add_subcommand("bench", "run a seeded noise sweep");
  bench_cmd->add_option("problem", bench.problem,
                        "relative-noncentral | absolute-central | absolute-noncentral")
      ->required();
  bench_cmd->add_option("--trials", bench.trials, "trials per noise level");
  bench_cmd->add_option("--noise", bench.noise, "noise grid in pixels, min:step:max");
  bench_cmd->add_option("--points", bench.points, "correspondences per trial");
  bench_cmd->add_option("--seed", bench.seed, "base seed");
  bench_cmd->add_option("--solver", bench.solvers, "amm-gec | amm-gpnp | amm-upnp (repeatable)");
  bench.amm.add_to(*bench_cmd);
  bench_cmd->add_flag("--summary", bench.summary, "append per-level mean rows");
  bench_cmd->add_flag("--timing", bench.timing, "record solver wall time (output is then not reproducible)");
  bench_cmd->add_option("--out", bench.out_path, "CSV path (default stdout)");

  SolveArgs solve;
  CLI::App* solve_cmd = app.add_subcommand("solve", "solve one correspondence file");
  solve_cmd->add_option("--input", solve.input, "correspondence file")->required();
  solve_cmd->add_option("--solver", solve.solver, "amm-gec | amm-gpnp | amm-upnp")->required();
  solve_cmd->add_option("--t0", solve.t0, "initial translation x,y,z");
  solve.amm.add_to(*solve_cmd);

  GenerateArgs generate;
  CLI::App* generate_cmd =
      app.add_subcommand("generate", "write a synthetic correspondence file");
  generate_cmd->add_option("problem", generate.problem,
                           "relative-noncentral | absolute-central | absolute-noncentral")
      ->required();
  generate_cmd->add_option("--points", generate.points, "correspondences");
  generate_cmd->add_option("--noise", generate.noise, "pixel noise sigma");
  generate_cmd->add_option("--seed", generate.seed, "seed");
  generate_cmd->add_option("--out", generate.out_path, "output path (default stdout)");

  // CLI11 wants argv order reversed when handed a vector.
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (bench_cmd->parsed()) return cmd_bench(bench, bench_cmd->help(), out, err);
    if (solve_cmd->parsed()) return cmd_solve(solve, solve_cmd->help(), out, err);
    return cmd_generate(generate, generate_cmd->help(), out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace poseamm
