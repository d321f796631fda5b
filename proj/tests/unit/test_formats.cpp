#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include "random_column.hpp"
#include "stixels/formats.hpp"
#include "stixels/solver.hpp"
#include "stixels/synthetic.hpp"

namespace stixels {
namespace {

const std::filesystem::path kData = STIXELS_TEST_DATA;

template <typename T>
std::string to_text(const T& value, void (*writer)(const T&, std::ostream&)) {
  std::ostringstream out;
  writer(value, out);
  return out.str();
}

template <typename T>
T from_text(const std::string& s, T (*reader)(std::istream&)) {
  std::istringstream in(s);
  return reader(in);
}

// Returns the FormatError raised by `f`, failing the test if none is.
template <typename F>
FormatError format_error(F f) {
  try {
    f();
  } catch (const FormatError& e) {
    return e;
  }
  ADD_FAILURE() << "no FormatError";
  return FormatError(0, 0, "");
}

Scan random_scan(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Scan s;
  s.classes = ScanClasses::identity(testing::four_labels());
  for (int c = 0; c < 5; ++c) {
    ScanColumn col = testing::random_column(rng, s.classes.stixel);
    col.azimuth_rad = 0.1 * c;
    for (auto& m : col.cells) m.depth.azimuth_rad = col.azimuth_rad;
    s.columns.push_back(col);
  }
  return s;
}

void expect_same_scan(const Scan& a, const Scan& b) {
  ASSERT_EQ(a.columns.size(), b.columns.size());
  EXPECT_EQ(a.classes.stixel.names(), b.classes.stixel.names());
  EXPECT_EQ(a.classes.lidar_map, b.classes.lidar_map);
  EXPECT_EQ(a.classes.camera_map, b.classes.camera_map);
  for (std::size_t c = 0; c < a.columns.size(); ++c) {
    EXPECT_EQ(a.columns[c].azimuth_rad, b.columns[c].azimuth_rad);
    ASSERT_EQ(a.columns[c].cells.size(), b.columns[c].cells.size());
    for (std::size_t j = 0; j < a.columns[c].cells.size(); ++j) {
      const auto& x = a.columns[c].cells[j];
      const auto& y = b.columns[c].cells[j];
      EXPECT_EQ(x.depth.range_m, y.depth.range_m);
      EXPECT_EQ(x.depth.azimuth_rad, y.depth.azimuth_rad);
      EXPECT_EQ(x.depth.elevation_rad, y.depth.elevation_rad);
      ASSERT_EQ(x.lidar_sem.has_value(), y.lidar_sem.has_value());
      if (x.lidar_sem) EXPECT_EQ(*x.lidar_sem, *y.lidar_sem);
      ASSERT_EQ(x.cam_sem.has_value(), y.cam_sem.has_value());
      if (x.cam_sem) EXPECT_EQ(*x.cam_sem, *y.cam_sem);
    }
  }
}

TEST(ScanFormat, RoundTripIsExact) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Scan s = random_scan(seed);
    const std::string text = to_text(s, &write_scan);
    const Scan back = from_text(text, &read_scan);
    expect_same_scan(s, back);
    EXPECT_EQ(to_text(back, &write_scan), text);
  }
}

TEST(ScanFormat, FixtureFieldByField) {
  const Scan s = read_scan(kData / "metrics.scan");
  ASSERT_EQ(s.columns.size(), 1u);
  ASSERT_EQ(s.height(), 10u);
  EXPECT_EQ(s.classes.stixel.names(), (std::vector<std::string>{"road", "car", "sky"}));
  EXPECT_EQ(s.classes.stixel.structural_of(2), StructuralClass::Sky);
  EXPECT_EQ(s.columns[0].azimuth_rad, 0.25);
  const double ranges[] = {10, 10, 10.2, 9.9, 11, 10, 8, 10.4};
  const double elevations[] = {-0.1, -0.08, -0.06, -0.04, -0.02, 0, 0.02, 0.04, 0.06, 0.08};
  for (std::size_t j = 0; j < 10; ++j) {
    const auto& m = s.columns[0].cells[j];
    EXPECT_EQ(m.depth.elevation_rad, elevations[j]) << j;
    if (j < 8) {
      ASSERT_TRUE(m.depth.valid());
      EXPECT_EQ(*m.depth.range_m, ranges[j]);
      ASSERT_TRUE(m.lidar_sem);
      EXPECT_EQ(*m.lidar_sem, Eigen::Vector3d(0.1, 0.8, 0.1));
    } else {
      EXPECT_FALSE(m.depth.valid());
      EXPECT_FALSE(m.lidar_sem);
    }
    EXPECT_EQ(m.cam_sem.has_value(), j == 0);
  }
}

TEST(ScanFormat, NonIdentityMapRoundTrips) {
  Scan s = random_scan(9);
  s.classes.lidar = ClassSet({"flat", "thing"}, {StructuralClass::Ground, StructuralClass::Object});
  s.classes.lidar_map = Eigen::MatrixXd::Zero(2, 4);
  s.classes.lidar_map << 1, 0, 0, 0,
                         0, 0.5, 0.5, 0;
  for (auto& col : s.columns) {
    for (auto& m : col.cells) {
      if (m.lidar_sem) m.lidar_sem = Eigen::Vector2d(0.25, 0.75);
    }
  }
  const Scan back = from_text(to_text(s, &write_scan), &read_scan);
  EXPECT_EQ(back.classes.lidar.names(), s.classes.lidar.names());
  EXPECT_EQ(back.classes.lidar_map, s.classes.lidar_map);
}

TEST(ScanFormat, MissingHeaderFieldIsNamed) {
  const std::string doc =
      "stixel-scan 1\n"
      "columns 1\n"
      "classes lidar road:ground\n";
  const auto e = format_error([&] { from_text(doc, &read_scan); });
  EXPECT_NE(std::string(e.what()).find("missing header field 'height'"), std::string::npos)
      << e.what();
}

TEST(ScanFormat, RejectsUnknownVersionAndKind) {
  auto e = format_error([] { from_text<Scan>("stixel-scan 2\n", &read_scan); });
  EXPECT_EQ(e.line(), 1u);
  EXPECT_EQ(e.column(), 13u);
  EXPECT_NE(std::string(e.what()).find("unsupported stixel-scan version 2"), std::string::npos);

  e = format_error([] { from_text<Scan>("# c\n\nstixel-world 1\n", &read_scan); });
  EXPECT_EQ(e.line(), 3u);
  EXPECT_EQ(e.column(), 1u);

  e = format_error([] { from_text<Scan>("", &read_scan); });
  EXPECT_EQ(e.line(), 1u);
}

TEST(ScanFormat, DiagnosticsPointAtTheField) {
  std::string text = to_text(read_scan(kData / "metrics.scan"), &write_scan);
  const auto pos = text.find("m 10.2");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 6, "m -3.5");
  const std::size_t line = 1 + static_cast<std::size_t>(
                                   std::count(text.begin(), text.begin() + static_cast<long>(pos), '\n'));
  const auto e = format_error([&] { from_text(text, &read_scan); });
  EXPECT_EQ(e.line(), line);
  EXPECT_EQ(e.column(), 3u);
  EXPECT_NE(std::string(e.what()).find("range must be finite and > 0"), std::string::npos);
}

TEST(ScanFormat, RejectsGarbage) {
  std::string text = to_text(read_scan(kData / "metrics.scan"), &write_scan);
  EXPECT_THROW(from_text(text + "column 1 0.0\n", &read_scan), FormatError);
  std::string bad = text;
  bad.replace(bad.find("lidar 0.1"), 9, "lidar x.1");
  EXPECT_THROW(from_text(bad, &read_scan), FormatError);
  bad = text;
  bad.replace(bad.find("road:ground"), 11, "road:floor");
  EXPECT_THROW(from_text(bad, &read_scan), FormatError);
}

TEST(ScanFormat, MissingFileIsAnIoError) {
  EXPECT_THROW(read_scan(std::filesystem::path("/nonexistent/dir/x.scan")), IoError);
}

StixelWorld solved_world() {
  Scan s = random_scan(4);
  return solve_scan(s, ModelParams{}, SolveOptions{1});
}

TEST(WorldFormat, RoundTripIsExact) {
  const StixelWorld w = solved_world();
  const std::string text = to_text(w, &write_world);
  const StixelWorld back = from_text(text, &read_world);
  EXPECT_EQ(back.columns, w.columns);
  EXPECT_EQ(back.energies, w.energies);
  EXPECT_EQ(back.height, w.height);
  EXPECT_EQ(to_text(back, &write_world), text);
}

TEST(WorldFormat, UnknownEnergyClearsEnergies) {
  const StixelWorld w = read_world(kData / "metrics.world");
  EXPECT_TRUE(w.energies.empty());
  ASSERT_EQ(w.columns.size(), 1u);
  EXPECT_EQ(w.columns[0].stixels[0].distance, StixelDistance::finite(10.0));
}

TEST(WorldFormat, RejectsBrokenColumns) {
  const std::string head =
      "stixel-world 1\nheight 10\ncolumns 1\nclasses stixel road:ground car:object sky:sky\n";
  auto e = format_error([&] {
    from_text(head + "column 0 unknown 2\ns 0 3 5 road ground\ns 5 9 inf sky sky\n",
              &read_world);
  });
  EXPECT_EQ(e.line(), 5u);
  EXPECT_NE(std::string(e.what()).find("non-contiguous"), std::string::npos) << e.what();

  e = format_error([&] {
    from_text(head + "column 0 unknown 1\ns 0 9 5 road object\n", &read_world);
  });
  EXPECT_EQ(e.column(), 14u);

  EXPECT_THROW(from_text(head + "column 0 unknown 1\ns 0 9 inf car object\n", &read_world),
               FormatError);
  EXPECT_THROW(from_text(head + "column 0 unknown 1\ns 0 10 4 car object\n", &read_world),
               FormatError);
  EXPECT_NO_THROW(from_text(head + "column 0 unknown 1\ns 0 9 none car object\n", &read_world));
}

TEST(LabelsFormat, RoundTrip) {
  PointLabels l = read_labels(kData / "iou.labels");
  l.columns[0][3] = std::nullopt;
  const std::string text = to_text(l, &write_labels);
  const PointLabels back = from_text(text, &read_labels);
  EXPECT_EQ(back.columns, l.columns);
  EXPECT_EQ(back.classes.names(), l.classes.names());
  EXPECT_NE(text.find("unlabeled"), std::string::npos);
}

TEST(ParamsFormat, RoundTripAndDefaults) {
  ModelParams p;
  p.mc_cost = 2.75;
  p.sens_shift = 0.1 + 0.2;
  EXPECT_EQ(from_text(to_text(p, &write_params), &read_params), p);
  EXPECT_EQ(from_text<ModelParams>("stixel-params 1\n", &read_params), ModelParams{});
  const ModelParams one = from_text<ModelParams>("stixel-params 1\nmc_cost 1.5\n", &read_params);
  EXPECT_EQ(one.mc_cost, 1.5);
  EXPECT_EQ(one.w_geo, 1.0);
}

TEST(ParamsFormat, RejectsUnknownKeysAndBadValues) {
  const auto e = format_error([] {
    from_text<ModelParams>("stixel-params 1\nmc_cost 1\n  wgeo 2\n", &read_params);
  });
  EXPECT_EQ(e.line(), 3u);
  EXPECT_EQ(e.column(), 3u);
  EXPECT_THROW(from_text<ModelParams>("stixel-params 1\noutlier_rate 1.5\n", &read_params),
               std::invalid_argument);
}

TEST(ParamsFormat, ShippedDefaultsMatchTheLibrary) {
  const auto file = kData.parent_path().parent_path() / "params" / "default.params";
  EXPECT_EQ(read_params(file), ModelParams{});
}

TEST(ParamsFormat, KeysAndFields) {
  const auto& keys = param_keys();
  EXPECT_EQ(keys.size(), 13u);
  ModelParams p;
  for (const auto& k : keys) ASSERT_NE(param_field(p, k), nullptr) << k;
  *param_field(p, "w_sem_cam") = 0.0;
  EXPECT_EQ(p.w_sem_cam, 0.0);
  EXPECT_EQ(param_field(p, "nope"), nullptr);
}

TEST(ParamsHash, FrozenDefaultAndSensitivity) {
  EXPECT_EQ(params_hash(ModelParams{}), "93c1ea14568d805d");
  ModelParams p;
  p.mc_cost = std::nextafter(p.mc_cost, 10.0);
  EXPECT_NE(params_hash(p), params_hash(ModelParams{}));
}

TEST(SceneFormat, RoundTripIsStable) {
  const SceneSpec s = noisy_urban_scene(0.03, 0.01, 0.05, 0.1, 7);
  const std::string text = to_text(s, &write_scene);
  const SceneSpec back = from_text(text, &read_scene);
  EXPECT_EQ(to_text(back, &write_scene), text);
  EXPECT_EQ(back.rows, s.rows);
  EXPECT_EQ(back.elevation_max_rad, s.elevation_max_rad);
  EXPECT_NE(text.find("elevation_max_deg 15\n"), std::string::npos);
  EXPECT_EQ(back.seed, 7u);
  EXPECT_EQ(back.sigma_range_m, 0.03);
  ASSERT_EQ(back.boxes.size(), s.boxes.size());
  for (std::size_t i = 0; i < s.boxes.size(); ++i) {
    EXPECT_EQ(back.boxes[i].azimuth_min_rad, s.boxes[i].azimuth_min_rad);
    EXPECT_EQ(back.boxes[i].azimuth_max_rad, s.boxes[i].azimuth_max_rad);
    EXPECT_EQ(back.boxes[i].label, s.boxes[i].label);
  }
  ASSERT_EQ(back.ground_bands.size(), 3u);
  EXPECT_EQ(back.ground_bands[1].label, "sidewalk");
  EXPECT_EQ(back.ground_bands[2].until_m, s.ground_bands[2].until_m);
}

TEST(SceneFormat, RejectsUnknownFields) {
  EXPECT_THROW(from_text<SceneSpec>("stixel-scene 1\nrowz 4\n", &read_scene), FormatError);
}

TEST(ReportFormat, ListsEveryClass) {
  EvalReport r;
  r.outlier_rate = 0.25;
  r.mean_iou = 0.3;
  r.compression_rate = 0.9;
  r.points = 10;
  r.valid_points = 8;
  r.stixels = 1;
  r.iou_per_class = {{"road", 0.6}, {"car", 0.0}};
  std::ostringstream out;
  write_report(r, "abc", out);
  const std::string text = out.str();
  EXPECT_EQ(text.rfind("stixel-report 1\n", 0), 0u);
  EXPECT_NE(text.find("outlier_rate 0.25\n"), std::string::npos);
  EXPECT_NE(text.find("iou road 0.6\n"), std::string::npos);
  EXPECT_NE(text.find("iou car 0\n"), std::string::npos);
  EXPECT_NE(text.find("params_hash abc\n"), std::string::npos);
}

}  // namespace
}  // namespace stixels
