#include "poseamm/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

#include "poseamm/errors.hpp"

namespace poseamm {
namespace {

constexpr double kPlueckerTolerance = 1e-6;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool parse_double(std::string_view token, double& value) {
  // from_chars rejects a leading '+'; accept it for hand-written files.
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  const char* end = token.data() + token.size();
  const auto result = std::from_chars(token.data(), end, value);
  return result.ec == std::errc() && result.ptr == end;
}

template <typename Int>
bool parse_int(std::string_view token, Int& value) {
  const char* end = token.data() + token.size();
  const auto result = std::from_chars(token.data(), end, value);
  return result.ec == std::errc() && result.ptr == end;
}

std::vector<std::string_view> split_whitespace(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    const auto start = line.find_first_not_of(" \t\r", pos);
    if (start == std::string_view::npos) break;
    auto stop = line.find_first_of(" \t\r", start);
    if (stop == std::string_view::npos) stop = line.size();
    out.push_back(line.substr(start, stop - start));
    pos = stop;
  }
  return out;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto stop = line.find(',', pos);
    if (stop == std::string_view::npos) {
      out.push_back(line.substr(pos));
      return out;
    }
    out.push_back(line.substr(pos, stop - pos));
    pos = stop + 1;
  }
}

Eigen::Vector3d vector_at(const std::vector<double>& values, std::size_t offset) {
  return {values[offset], values[offset + 1], values[offset + 2]};
}

void write_vector(std::ostream& out, const Eigen::Vector3d& v) {
  out << format_real(v.x()) << ' ' << format_real(v.y()) << ' ' << format_real(v.z());
}

}  // namespace

std::string format_real(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

CorrespondenceSet parse_correspondences(std::istream& in) {
  CorrespondenceSet set;
  bool have_kind = false;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    if (!have_kind) {
      if (line == "absolute") {
        set.kind = CorrespondenceKind::kAbsolute;
      } else if (line == "relative") {
        set.kind = CorrespondenceKind::kRelative;
      } else {
        throw ParseError(line_no, "expected header 'absolute' or 'relative'");
      }
      have_kind = true;
      continue;
    }

    const auto tokens = split_whitespace(line);
    const std::size_t expected = set.kind == CorrespondenceKind::kAbsolute ? 9 : 12;
    if (tokens.size() != expected) {
      throw ParseError(line_no, "expected " + std::to_string(expected) + " fields, found " +
                                    std::to_string(tokens.size()));
    }
    std::vector<double> values(expected);
    for (std::size_t k = 0; k < expected; ++k) {
      if (!parse_double(tokens[k], values[k]) || !std::isfinite(values[k])) {
        throw ParseError(line_no, "field " + std::to_string(k + 1) + " is not a finite number: '" +
                                      std::string(tokens[k]) + "'");
      }
    }

    if (set.kind == CorrespondenceKind::kAbsolute) {
      PointRayCorrespondence corr;
      corr.point = vector_at(values, 0);
      const Eigen::Vector3d bearing = vector_at(values, 3);
      if (!(bearing.norm() > 0.0)) throw ConstraintViolation(line_no, "zero-length bearing");
      corr.ray.bearing = bearing.normalized();
      corr.ray.offset = vector_at(values, 6);
      set.absolute.push_back(corr);
    } else {
      RayCorrespondence corr;
      PlueckerLine* lines[2] = {&corr.line1, &corr.line2};
      for (int l = 0; l < 2; ++l) {
        const Eigen::Vector3d direction = vector_at(values, 6 * l);
        const Eigen::Vector3d moment = vector_at(values, 6 * l + 3);
        const double norm = direction.norm();
        if (!(norm > 0.0)) throw ConstraintViolation(line_no, "zero-length ray direction");
        lines[l]->direction = direction / norm;
        lines[l]->moment = moment / norm;
        if (std::abs(lines[l]->direction.dot(lines[l]->moment)) > kPlueckerTolerance) {
          throw ConstraintViolation(line_no, "ray " + std::to_string(l + 1) +
                                                 " violates the Pluecker constraint d.m = 0");
        }
      }
      set.relative.push_back(corr);
    }
  }
  if (!have_kind) throw ParseError(line_no + 1, "missing header 'absolute' or 'relative'");
  return set;
}

CorrespondenceSet parse_correspondence_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PoseError("cannot open " + path.string());
  return parse_correspondences(in);
}

void write_correspondences(std::ostream& out, const CorrespondenceSet& set,
                           const std::optional<Pose>& truth) {
  if (truth) {
    out << "# truth rotation";
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) out << ' ' << format_real(truth->rotation(i, j));
    }
    out << "\n# truth translation ";
    write_vector(out, truth->translation);
    out << '\n';
  }
  if (set.kind == CorrespondenceKind::kAbsolute) {
    out << "absolute\n";
    for (const PointRayCorrespondence& c : set.absolute) {
      write_vector(out, c.point);
      out << "  ";
      write_vector(out, c.ray.bearing);
      out << "  ";
      write_vector(out, c.ray.offset);
      out << '\n';
    }
  } else {
    out << "relative\n";
    for (const RayCorrespondence& c : set.relative) {
      write_vector(out, c.line1.direction);
      out << ' ';
      write_vector(out, c.line1.moment);
      out << "  ";
      write_vector(out, c.line2.direction);
      out << ' ';
      write_vector(out, c.line2.moment);
      out << '\n';
    }
  }
}

void write_sweep_csv(std::ostream& out, const std::vector<TrialRecord>& records,
                     const std::vector<LevelSummary>& summaries) {
  out << kSweepCsvHeader << '\n';
  for (const TrialRecord& r : records) {
    out << format_real(r.noise_sigma) << ',' << r.trial_index << ',' << r.solver_name << ','
        << format_real(r.rot_err_frobenius) << ',' << format_real(r.trans_err_norm) << ','
        << r.wall_time_ns << ',' << r.outer_iterations << ',' << format_real(r.final_objective)
        << ',' << (r.converged ? 1 : 0) << '\n';
  }
  for (const LevelSummary& s : summaries) {
    out << format_real(s.noise_sigma) << ",mean," << s.solver_name << ','
        << format_real(s.mean_rot_err) << ',' << format_real(s.mean_trans_err) << ','
        << format_real(s.mean_time_ns) << ',' << format_real(s.mean_iterations) << ','
        << format_real(s.mean_final_objective) << ',' << format_real(s.converged_fraction)
        << '\n';
  }
}

SweepTable read_sweep_csv(std::istream& in) {
  SweepTable table;
  std::string raw;
  std::size_t line_no = 0;
  if (!std::getline(in, raw) || trim(raw) != kSweepCsvHeader) {
    throw ParseError(1, "missing sweep CSV header");
  }
  ++line_no;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    const auto f = split_commas(line);
    if (f.size() != 9) throw ParseError(line_no, "expected 9 comma-separated fields");
    auto real = [&](std::size_t k) {
      double v = 0.0;
      if (!parse_double(f[k], v)) throw ParseError(line_no, "bad number in column " + std::to_string(k + 1));
      return v;
    };

    if (f[1] == "mean") {
      LevelSummary s;
      s.noise_sigma = real(0);
      s.solver_name = std::string(f[2]);
      s.mean_rot_err = real(3);
      s.mean_trans_err = real(4);
      s.mean_time_ns = real(5);
      s.mean_iterations = real(6);
      s.mean_final_objective = real(7);
      s.converged_fraction = real(8);
      table.summaries.push_back(s);
      continue;
    }

    TrialRecord r;
    r.noise_sigma = real(0);
    if (!parse_int(f[1], r.trial_index)) throw ParseError(line_no, "bad trial index");
    r.solver_name = std::string(f[2]);
    r.rot_err_frobenius = real(3);
    r.trans_err_norm = real(4);
    if (!parse_int(f[5], r.wall_time_ns)) throw ParseError(line_no, "bad time");
    if (!parse_int(f[6], r.outer_iterations)) throw ParseError(line_no, "bad iteration count");
    r.final_objective = real(7);
    if (f[8] != "0" && f[8] != "1") throw ParseError(line_no, "converged must be 0 or 1");
    r.converged = f[8] == "1";
    r.failed = !std::isfinite(r.rot_err_frobenius);
    table.records.push_back(std::move(r));
  }
  return table;
}

}  // namespace poseamm
