#include <filesystem>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "poseamm/io.hpp"
#include "test_support.hpp"

namespace poseamm {
namespace {

CorrespondenceSet parse(const std::string& text) {
  std::istringstream in(text);
  return parse_correspondences(in);
}

template <typename Error>
std::size_t error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    return e.line();
  }
  ADD_FAILURE() << "no error raised";
  return 0;
}

TEST(CorrespondenceFile, ThreeAbsoluteRecords) {
  const CorrespondenceSet set = parse(
      "# three rays\n"
      "absolute\n"
      "1 2 3  0 0 2  0 0 0\n"
      "\n"
      "-1 0.5 +4  3 0 4  0.1 0 0   # trailing comment\n"
      "0 0 1e1  0 1 0  0 0 -2\n");
  EXPECT_EQ(set.kind, CorrespondenceKind::kAbsolute);
  ASSERT_EQ(set.absolute.size(), 3u);
  EXPECT_EQ(set.absolute[0].point, Eigen::Vector3d(1, 2, 3));
  EXPECT_EQ(set.absolute[0].ray.bearing, Eigen::Vector3d(0, 0, 1));
  EXPECT_NEAR((set.absolute[1].ray.bearing - Eigen::Vector3d(0.6, 0, 0.8)).norm(), 0.0, 1e-15);
  EXPECT_EQ(set.absolute[1].point.z(), 4.0);
  EXPECT_EQ(set.absolute[2].ray.offset, Eigen::Vector3d(0, 0, -2));
}

TEST(CorrespondenceFile, RelativeRecordsAreNormalizedTogether) {
  const CorrespondenceSet set = parse("relative\n0 0 2 2 0 0  1 0 0 0 0 0\n");
  ASSERT_EQ(set.relative.size(), 1u);
  EXPECT_EQ(set.relative[0].line1.direction, Eigen::Vector3d(0, 0, 1));
  // The moment is scaled with the direction so the line is unchanged.
  EXPECT_EQ(set.relative[0].line1.moment, Eigen::Vector3d(1, 0, 0));
}

TEST(CorrespondenceFile, WrongFieldCountNamesLine) {
  EXPECT_EQ(error_line<ParseError>("absolute\n1 2 3 0 0 1 0 0 0\n1 2 3 0 0 1 0 0\n"), 3u);
  EXPECT_EQ(error_line<ParseError>("relative\n\n# c\n1 2 3 0 0 1 0 0 0\n"), 4u);
}

TEST(CorrespondenceFile, BadNumbersNameLine) {
  EXPECT_EQ(error_line<ParseError>("absolute\n1 2 x 0 0 1 0 0 0\n"), 2u);
  EXPECT_EQ(error_line<ParseError>("absolute\n1 2 3 0 0 1 0 0 nan\n"), 2u);
  EXPECT_EQ(error_line<ParseError>("absolute\n1 2 3,0 0 0 1 0 0 0\n"), 2u);
}

TEST(CorrespondenceFile, HeaderRequired) {
  EXPECT_EQ(error_line<ParseError>("# only a comment\n1 2 3 0 0 1 0 0 0\n"), 2u);
  EXPECT_THROW(parse(""), ParseError);
}

TEST(CorrespondenceFile, PlueckerViolationRejected) {
  // direction (1,0,0), moment (0.1,0,1): d . m = 0.1.
  EXPECT_EQ(error_line<ConstraintViolation>(
                "relative\n1 0 0 0 0 1  0 0 1 0 0 0\n1 0 0 0.1 0 1  0 0 1 0 0 0\n"),
            3u);
  EXPECT_EQ(error_line<ConstraintViolation>("absolute\n1 2 3 0 0 0 0 0 0\n"), 2u);
}

TEST(CorrespondenceFile, MissingFile) {
  EXPECT_THROW(parse_correspondence_file("/nonexistent/poseamm/input.txt"), PoseError);
}

TEST(CorrespondenceFile, WriteThenParseIsLossless) {
  const RelativeScene rel = generate_relative_scene(test::scene_config(1, Rig::kNonCentral, 20, 1.0));
  CorrespondenceSet set;
  set.kind = CorrespondenceKind::kRelative;
  set.relative = rel.corrs;
  std::ostringstream out;
  write_correspondences(out, set, rel.ground_truth);
  const CorrespondenceSet back = parse(out.str());
  ASSERT_EQ(back.relative.size(), set.relative.size());
  for (std::size_t i = 0; i < set.relative.size(); ++i) {
    EXPECT_LT((back.relative[i].line1.direction - set.relative[i].line1.direction).norm(), 1e-15);
    EXPECT_LT((back.relative[i].line2.moment - set.relative[i].line2.moment).norm(), 1e-14);
  }

  const AbsoluteScene abs = generate_absolute_scene(test::scene_config(2));
  set = {};
  set.absolute = abs.corrs;
  out.str("");
  write_correspondences(out, set);
  const CorrespondenceSet abs_back = parse(out.str());
  ASSERT_EQ(abs_back.absolute.size(), abs.corrs.size());
  for (std::size_t i = 0; i < abs.corrs.size(); ++i) {
    EXPECT_EQ(abs_back.absolute[i].point, abs.corrs[i].point);
  }
}

std::vector<TrialRecord> sample_rows() {
  std::vector<TrialRecord> rows(3);
  rows[0] = {0.0, 0, "amm-gpnp", 1.0 / 3.0, 2e-17, 12345, 7, 1e-30, true};
  rows[1] = {2.5, 1, "amm-upnp", 0.1, 0.7, 0, 100, 4.25, false};
  const double inf = std::numeric_limits<double>::infinity();
  rows[2] = {10.0, 2, "amm-gec", inf, inf, 0, 0, inf, false};
  return rows;
}

TEST(SweepCsv, WriteReadWriteIsByteIdentical) {
  const std::vector<TrialRecord> rows = sample_rows();
  std::ostringstream first;
  write_sweep_csv(first, rows, summarize(rows));
  std::istringstream in(first.str());
  const SweepTable table = read_sweep_csv(in);
  EXPECT_EQ(table.records.size(), 3u);
  EXPECT_EQ(table.summaries.size(), 3u);
  EXPECT_EQ(table.records[0].rot_err_frobenius, 1.0 / 3.0);
  EXPECT_EQ(table.records[0].wall_time_ns, 12345);
  EXPECT_FALSE(table.records[1].failed);
  EXPECT_TRUE(table.records[2].failed);
  std::ostringstream second;
  write_sweep_csv(second, table.records, table.summaries);
  EXPECT_EQ(first.str(), second.str());
}

TEST(SweepCsv, HeaderAndRowLayout) {
  std::ostringstream out;
  write_sweep_csv(out, {sample_rows()[1]});
  EXPECT_EQ(out.str(),
            "noise,trial,solver,rot_err,trans_err,time_ns,iters,final_obj,converged\n"
            "2.5,1,amm-upnp,0.10000000000000001,0.69999999999999996,0,100,4.25,0\n");
}

TEST(SweepCsv, MalformedInput) {
  auto read = [](const std::string& text) {
    std::istringstream in(text);
    return read_sweep_csv(in);
  };
  const std::string header =
      "noise,trial,solver,rot_err,trans_err,time_ns,iters,final_obj,converged\n";
  EXPECT_THROW(read("noise,trial\n"), ParseError);
  EXPECT_THROW(read(header + "0,0,amm-gpnp,1,1,0,1,1\n"), ParseError);
  EXPECT_THROW(read(header + "0,0,amm-gpnp,1,1,0,1,1,2\n"), ParseError);
  EXPECT_THROW(read(header + "0,x,amm-gpnp,1,1,0,1,1,1\n"), ParseError);
  EXPECT_EQ(read(header).records.size(), 0u);
}

}  // namespace
}  // namespace poseamm
