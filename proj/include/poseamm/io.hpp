#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "poseamm/bench.hpp"
#include "poseamm/gec.hpp"
#include "poseamm/gpnp.hpp"

namespace poseamm {

// Plain-text correspondence files:
//
//   # comments run to end of line
//   absolute                       (or: relative)
//   px py pz  bx by bz  cx cy cz   one absolute record per line
//   d1x d1y d1z m1x m1y m1z  d2x d2y d2z m2x m2y m2z   one relative record
//
// Bearings and ray directions are normalized on load (relative moments are
// scaled with their direction). A relative line whose |d . m| exceeds 1e-6
// after normalization is rejected.
enum class CorrespondenceKind { kAbsolute, kRelative };

struct CorrespondenceSet {
  CorrespondenceKind kind = CorrespondenceKind::kAbsolute;
  std::vector<PointRayCorrespondence> absolute;
  std::vector<RayCorrespondence> relative;
};

// Throws ParseError / ConstraintViolation carrying the 1-based line number.
CorrespondenceSet parse_correspondences(std::istream& in);
// Also throws PoseError if the file cannot be opened.
CorrespondenceSet parse_correspondence_file(const std::filesystem::path& path);

// With `truth`, the pose is recorded in leading comment lines
// ("# truth rotation" with 9 row-major values, "# truth translation").
void write_correspondences(std::ostream& out, const CorrespondenceSet& set,
                           const std::optional<Pose>& truth = std::nullopt);

// Sweep CSV:
//   noise,trial,solver,rot_err,trans_err,time_ns,iters,final_obj,converged
// Reals are written with 17 significant digits so that reading and writing
// back reproduces the same bytes. Summary rows carry "mean" in the trial
// column and hold per-level means, with the converged column holding the
// converged fraction.
inline constexpr const char* kSweepCsvHeader =
    "noise,trial,solver,rot_err,trans_err,time_ns,iters,final_obj,converged";

struct SweepTable {
  std::vector<TrialRecord> records;
  std::vector<LevelSummary> summaries;
};

void write_sweep_csv(std::ostream& out, const std::vector<TrialRecord>& records,
                     const std::vector<LevelSummary>& summaries = {});
// Throws ParseError with the offending line number.
SweepTable read_sweep_csv(std::istream& in);

// %.17g formatting used by every writer.
std::string format_real(double value);

}  // namespace poseamm
