#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "entrolab/systems.hpp"

using namespace entrolab;
namespace fs = std::filesystem;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::InvalidEntry;
}

std::string error_text(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("entrolab_systems_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)) + "_" +
             ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string write(const std::string& name, const std::string& text) const {
    const auto p = path_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

 private:
  fs::path path_;
};

SystemSpec spec_of(SystemKind k) {
  SystemSpec s;
  s.kind = k;
  return s;
}

}  // namespace

TEST(BuiltIn, RotationQuarterTurnIsAnIsometry) {
  auto s = spec_of(SystemKind::Rotation);
  s.p = 1;
  s.q = 4;
  const auto sys = build_system(s);
  EXPECT_EQ(sys.map.image(), (std::vector<std::size_t>{1, 2, 3, 0}));
  EXPECT_TRUE(is_isometry(sys.space, sys.map));
  EXPECT_DOUBLE_EQ(sys.space(0, 2), 1.0);
  EXPECT_DOUBLE_EQ(sys.space(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(sys.space(0, 3), 0.5);
}

TEST(BuiltIn, DoublingOrbitOfOneEighth) {
  auto s = spec_of(SystemKind::DyadicDoubling);
  s.m = 3;
  const auto sys = build_system(s);
  EXPECT_EQ(sys.space.size(), 8u);
  EXPECT_EQ(orbit(sys.space, sys.map, 1, 4), (std::vector<std::size_t>{1, 2, 4, 0}));
  EXPECT_DOUBLE_EQ(sys.space.diameter(), 1.0);
  EXPECT_FALSE(is_isometry(sys.space, sys.map));
}

TEST(BuiltIn, FullShiftDropsTheHeadAndAppendsIt) {
  auto s = spec_of(SystemKind::FullShift);
  s.k = 2;
  s.L = 3;
  const auto sys = build_system(s);
  ASSERT_EQ(sys.space.size(), 8u);
  const auto& lab = sys.space.labels();
  auto idx = [&](const std::string& w) {
    return static_cast<std::size_t>(std::find(lab.begin(), lab.end(), w) - lab.begin());
  };
  EXPECT_EQ(lab[idx("011")], "011");
  EXPECT_EQ(lab[sys.map(idx("011"))], "110");
  EXPECT_EQ(lab[sys.map(idx("100"))], "001");
  // Words agreeing on the first i symbols sit at distance 2^-i.
  EXPECT_DOUBLE_EQ(sys.space(idx("000"), idx("100")), 1.0);
  EXPECT_DOUBLE_EQ(sys.space(idx("010"), idx("011")), 0.25);
  EXPECT_NO_THROW(check_metric(sys.space.matrix()));
}

TEST(BuiltIn, FullShiftIsAPermutation) {
  auto s = spec_of(SystemKind::FullShift);
  s.k = 3;
  s.L = 4;
  const auto sys = build_system(s);
  std::vector<bool> hit(sys.space.size(), false);
  for (std::size_t x = 0; x < sys.space.size(); ++x) hit[sys.map(x)] = true;
  EXPECT_EQ(std::count(hit.begin(), hit.end(), true), static_cast<long>(sys.space.size()));
  EXPECT_EQ(sys.map.power(4), EndoMap::identity(sys.space.size()).image());
}

TEST(BuiltIn, TentFoldsTheInterval) {
  auto s = spec_of(SystemKind::Tent);
  s.m = 3;
  const auto sys = build_system(s);
  ASSERT_EQ(sys.space.size(), 9u);
  EXPECT_EQ(sys.map.image(), (std::vector<std::size_t>{0, 2, 4, 6, 8, 6, 4, 2, 0}));
  EXPECT_DOUBLE_EQ(sys.space(0, 8), 1.0);
  EXPECT_DOUBLE_EQ(sys.space(3, 5), 0.25);
}

TEST(BuiltIn, EveryKindProducesAMetricOfDiameterAtMostOne) {
  for (auto k : {SystemKind::DyadicDoubling, SystemKind::Rotation, SystemKind::FullShift, SystemKind::Tent}) {
    auto s = spec_of(k);
    s.m = 5;
    s.q = 31;
    s.p = 4;
    s.L = 5;
    const auto sys = build_system(s);
    EXPECT_NO_THROW(check_metric(sys.space.matrix())) << sys.name;
    EXPECT_LE(sys.space.diameter(), 1.0) << sys.name;
    EXPECT_EQ(sys.map.size(), sys.space.size());
  }
}

TEST(BuiltIn, ParametersOutOfRange) {
  auto s = spec_of(SystemKind::DyadicDoubling);
  s.m = 1;
  EXPECT_EQ(kind_of([&] { build_system(s); }), ErrorKind::ParamOutOfRange);
  s.m = 40;
  EXPECT_EQ(kind_of([&] { build_system(s); }), ErrorKind::ParamOutOfRange);
  s = spec_of(SystemKind::Rotation);
  s.p = 0;
  EXPECT_EQ(kind_of([&] { build_system(s); }), ErrorKind::ParamOutOfRange);
  s.p = 9;
  s.q = 9;
  EXPECT_EQ(kind_of([&] { build_system(s); }), ErrorKind::ParamOutOfRange);
  s = spec_of(SystemKind::FullShift);
  s.k = 1;
  EXPECT_EQ(kind_of([&] { build_system(s); }), ErrorKind::ParamOutOfRange);
  s.k = 2;
  s.L = 30;
  EXPECT_EQ(kind_of([&] { build_system(s); }), ErrorKind::ParamOutOfRange);
}

TEST(BuiltIn, KindNamesRoundTrip) {
  for (auto k : {SystemKind::DyadicDoubling, SystemKind::Rotation, SystemKind::FullShift, SystemKind::Tent,
                 SystemKind::Custom})
    EXPECT_EQ(parse_system_kind(to_string(k)), k);
  EXPECT_EQ(kind_of([] { parse_system_kind("baker"); }), ErrorKind::ConfigError);
}

TEST(Ingest, DuplicateRowsCollapseWithAWarning) {
  const auto r = ingest_trajectory(std::vector<std::vector<double>>{{0.5}, {0.5}}, MapRule::Successor);
  EXPECT_EQ(r.system.space.size(), 1u);
  ASSERT_EQ(r.system.warnings.size(), 1u);
  EXPECT_EQ(r.system.warnings[0].rfind("DuplicatePoints", 0), 0u);
  EXPECT_EQ(r.system.map(0), 0u);
}

TEST(Ingest, CollinearPointsAreRescaled) {
  const auto r = ingest_trajectory(std::vector<std::vector<double>>{{0, 0}, {1, 1}, {2, 2}}, MapRule::Successor);
  ASSERT_EQ(r.system.space.size(), 3u);
  EXPECT_DOUBLE_EQ(r.system.space(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(r.system.space(0, 2), 1.0);
  EXPECT_EQ(r.system.map.image(), (std::vector<std::size_t>{1, 2, 2}));
  EXPECT_TRUE(r.system.warnings.empty());
}

TEST(Ingest, LogisticTrajectoryFromFile) {
  TempDir dir;
  std::ostringstream csv;
  csv.precision(17);
  std::vector<double> xs;
  double x = 0.1234;
  for (int i = 0; i < 100; ++i) {
    xs.push_back(x);
    csv << x << "\n";
    x = 4.0 * x * (1.0 - x);
  }
  const auto path = dir.write("logistic.csv", csv.str());
  const auto r = ingest_trajectory(path, MapRule::Successor);
  ASSERT_EQ(r.system.space.size(), 100u);
  for (std::size_t i = 0; i + 1 < 100; ++i) EXPECT_EQ(r.system.map(i), i + 1);
  EXPECT_EQ(r.system.map(99), 99u);
  // The orbit already has diameter below 1, so distances are kept as read.
  EXPECT_LT(r.system.space.diameter(), 1.0);
  EXPECT_EQ(r.system.space.scale_factor(), 1.0);
  EXPECT_EQ(r.system.space(3, 7), std::abs(xs[3] - xs[7]));
}

TEST(Ingest, NearestImageRule) {
  // Row 3 revisits the neighbourhood of row 0, so the last point borrows row 0's image.
  const std::vector<std::vector<double>> rows{{0.0}, {1.0}, {0.5}, {0.05}};
  const auto r = ingest_trajectory(rows, MapRule::NearestImage);
  EXPECT_EQ(r.system.map.image(), (std::vector<std::size_t>{1, 2, 3, 1}));
  const auto s = ingest_trajectory(rows, MapRule::Successor);
  EXPECT_EQ(s.system.map.image(), (std::vector<std::size_t>{1, 2, 3, 3}));
}

TEST(Ingest, NearestImageSnapsOffGridSuccessors) {
  const auto r = ingest_trajectory(std::vector<std::vector<double>>{{0.0}, {1.0}, {0.0}, {0.98}}, MapRule::NearestImage);
  ASSERT_EQ(r.system.space.size(), 3u);
  EXPECT_EQ(r.source_row, (std::vector<std::size_t>{0, 1, 3}));
  // Point 0's first successor is row 1.
  EXPECT_EQ(r.system.map(0), 1u);
  EXPECT_EQ(r.system.map(1), 0u);
  EXPECT_EQ(r.system.map(2), r.system.map(1));
}

TEST(Ingest, EmptyTrajectory) {
  EXPECT_EQ(kind_of([] { ingest_trajectory(std::vector<std::vector<double>>{}, MapRule::Successor); }),
            ErrorKind::EmptySpace);
}

TEST(Csv, MalformedFilesReportRowAndColumn) {
  TempDir dir;
  const auto ragged = dir.write("ragged.csv", "0,1\n1\n");
  EXPECT_EQ(kind_of([&] { read_dist_csv(ragged); }), ErrorKind::FileMalformed);
  EXPECT_NE(error_text([&] { read_dist_csv(ragged); }).find("row 2"), std::string::npos)
      << error_text([&] { read_dist_csv(ragged); });
  const auto word = dir.write("word.csv", "0,1\n1,zero\n");
  const auto msg = error_text([&] { read_dist_csv(word); });
  EXPECT_NE(msg.find("row 2, column 2"), std::string::npos) << msg;
  const auto map = dir.write("map.csv", "1\n5\n");
  EXPECT_EQ(kind_of([&] { read_map_csv(map, 2); }), ErrorKind::FileMalformed);
  EXPECT_EQ(kind_of([&] { read_map_csv(map, 3); }), ErrorKind::FileMalformed);
  const auto pts = dir.write("pts.csv", "0,1\n2\n");
  EXPECT_EQ(kind_of([&] { read_points_csv(pts); }), ErrorKind::FileMalformed);
  EXPECT_EQ(kind_of([&] { read_dist_csv(dir.write("empty.csv", "")); }), ErrorKind::FileMalformed);
  EXPECT_EQ(kind_of([&] { read_dist_csv("/nonexistent/entrolab.csv"); }), ErrorKind::IoError);
}

TEST(Custom, DistanceAndMapFiles) {
  TempDir dir;
  auto s = spec_of(SystemKind::Custom);
  s.dist_path = dir.write("d.csv", "0,2,4\n2,0,2\n4,2,0\n");
  s.map_path = dir.write("f.csv", "1\n2\n2\n");
  const auto sys = build_system(s);
  EXPECT_DOUBLE_EQ(sys.space(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(sys.space.scale_factor(), 0.25);
  EXPECT_EQ(sys.map.image(), (std::vector<std::size_t>{1, 2, 2}));

  s.map_path.clear();
  EXPECT_EQ(kind_of([&] { build_system(s); }), ErrorKind::ConfigError);
  s.map_path = dir.write("f.csv", "1\n2\n2\n");
  s.dist_path = dir.write("bad.csv", "0,1,5\n1,0,1\n5,1,0\n");
  EXPECT_EQ(kind_of([&] { build_system(s); }), ErrorKind::TriangleViolation);
}

TEST(Custom, PointsFile) {
  TempDir dir;
  auto s = spec_of(SystemKind::Custom);
  s.points_path = dir.write("p.csv", "0,0\n3,4\n0,0\n");
  const auto sys = build_system(s);
  EXPECT_EQ(sys.space.size(), 2u);
  EXPECT_EQ(sys.warnings.size(), 1u);
  EXPECT_EQ(sys.map.image(), (std::vector<std::size_t>{1, 0}));
}
