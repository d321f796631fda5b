#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "stixels/formats.hpp"
#include "stixels/prior.hpp"
#include "stixels/synthetic.hpp"

namespace stixels {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

SceneSpec small_spec() {
  SceneSpec s;
  s.rows = 32;
  s.columns = 24;
  return s;
}

std::string scan_bytes(const Scan& scan) {
  std::ostringstream out;
  write_scan(scan, out);
  return out.str();
}

TEST(Generate, FlatWorldGeometry) {
  const SceneSpec spec = small_spec();
  const auto scene = generate(spec);
  for (std::size_t c = 0; c < spec.columns; ++c) {
    for (std::size_t j = 0; j < spec.rows; ++j) {
      const auto& d = scene.scan.columns[c].cells[j].depth;
      const double el = row_elevation(spec, j);
      EXPECT_EQ(d.elevation_rad, el);
      if (el < 0) {
        ASSERT_TRUE(d.valid());
        EXPECT_NEAR(*d.range_m, spec.sensor_height_m / std::sin(-el), 1e-12);
      } else {
        EXPECT_FALSE(d.valid());
      }
    }
  }
  EXPECT_TRUE(validate_scan(scene.scan).empty());
}

TEST(Generate, SeedDeterminism) {
  SceneSpec spec = noisy_urban_scene(0.03, 0.01, 0.05, 0.1, 42);
  spec.columns = 40;
  EXPECT_EQ(scan_bytes(generate(spec).scan), scan_bytes(generate(spec).scan));
  SceneSpec other = spec;
  other.seed = 43;
  EXPECT_NE(scan_bytes(generate(spec).scan), scan_bytes(generate(other).scan));
}

TEST(Generate, BoxColumnHasGroundObjectSky) {
  SceneSpec spec = small_spec();
  spec.rows = 64;
  spec.columns = 1;
  spec.azimuth_min_rad = -0.1;
  spec.azimuth_max_rad = 0.1;
  spec.boxes = {{-0.05, 0.05, 10.0, 2.5, "small_vehicle"}};
  const auto scene = generate(spec);
  const auto& truth = scene.truth.columns[0].stixels;
  ASSERT_EQ(truth.size(), 3u);
  EXPECT_EQ(truth[0].sclass, StructuralClass::Ground);
  EXPECT_EQ(truth[1].sclass, StructuralClass::Object);
  EXPECT_EQ(truth[1].distance, StixelDistance::finite(10.0));
  EXPECT_EQ(truth[2].sclass, StructuralClass::Sky);

  // Independent containment: a ray hits the face when its height at 10 m lies
  // on the face and the ground is not hit first.
  for (std::size_t j = 0; j < spec.rows; ++j) {
    const double el = row_elevation(spec, j);
    const double z = 10.0 * std::sin(el) + spec.sensor_height_m;
    const bool ground_first = el < 0 && spec.sensor_height_m / std::sin(-el) < 10.0;
    const bool on_face = z >= 0.0 && z <= 2.5 && !ground_first;
    EXPECT_EQ(on_face, j >= truth[1].bottom && j <= truth[1].top) << "row " << j;
  }
  EXPECT_GE(truth[1].size(), 10u);
}

TEST(Generate, TruthIsConsistentAndMatchesLabels) {
  SceneSpec spec = urban_scene();
  spec.columns = 90;
  const auto scene = generate(spec);
  for (std::size_t c = 0; c < spec.columns; ++c) {
    ASSERT_FALSE(consistency_check(scene.truth.columns[c], spec.rows));
    for (std::size_t j = 0; j < spec.rows; ++j) {
      EXPECT_EQ(scene.labels.columns[c][j], scene.truth.stixel_at(c, j).label);
    }
  }
  EXPECT_GT(scene.truth.num_stixels(), 3 * spec.columns);
}

TEST(Generate, CameraSemanticsOnlyInsideTheFieldOfView) {
  SceneSpec spec = small_spec();
  spec.columns = 36;
  const auto scene = generate(spec);
  for (std::size_t c = 0; c < spec.columns; ++c) {
    const double az = column_azimuth(spec, c);
    const bool inside = az >= spec.camera_fov_min_rad && az <= spec.camera_fov_max_rad;
    for (const auto& m : scene.scan.columns[c].cells) {
      EXPECT_EQ(m.cam_sem.has_value(), inside);
      EXPECT_TRUE(m.lidar_sem.has_value());
    }
  }
}

TEST(Generate, ConfusionPutsOneMinusEpsilonOnTheTruth) {
  SceneSpec spec = small_spec();
  spec.epsilon_lidar = 0.2;
  const auto scene = generate(spec);
  const auto& m = scene.scan.columns[3].cells[0];
  const std::size_t road = *spec.classes.index_of("road");
  EXPECT_DOUBLE_EQ((*m.lidar_sem)[static_cast<Eigen::Index>(road)], 0.8);
  EXPECT_NEAR(m.lidar_sem->sum(), 1.0, 1e-12);
  EXPECT_DOUBLE_EQ((*m.lidar_sem)[1], 0.2 / 12.0);
}

TEST(Generate, DropoutAndOutliers) {
  SceneSpec spec = small_spec();
  spec.columns = 200;
  spec.dropout_rate = 0.3;
  const auto dropped = generate(spec);
  std::size_t below = 0, invalid = 0;
  for (std::size_t c = 0; c < spec.columns; ++c) {
    for (std::size_t j = 0; j < spec.rows; ++j) {
      if (row_elevation(spec, j) >= 0) continue;
      ++below;
      invalid += dropped.scan.columns[c].cells[j].depth.valid() ? 0 : 1;
    }
  }
  EXPECT_NEAR(static_cast<double>(invalid) / static_cast<double>(below), 0.3, 0.03);

  // Noise draws are aligned across rates, so the clean scene of the same
  // seed tells which returns were replaced.
  spec.dropout_rate = 0.0;
  const auto clean = generate(spec);
  spec.outlier_rate = 0.5;
  const auto noisy = generate(spec);
  std::size_t valid = 0, replaced = 0;
  for (std::size_t c = 0; c < spec.columns; ++c) {
    for (std::size_t j = 0; j < spec.rows; ++j) {
      const auto& a = clean.scan.columns[c].cells[j].depth;
      const auto& b = noisy.scan.columns[c].cells[j].depth;
      ASSERT_EQ(a.valid(), b.valid());
      if (!a.valid()) continue;
      ++valid;
      if (*a.range_m == *b.range_m) continue;
      ++replaced;
      EXPECT_GT(*b.range_m, 0.0);
      EXPECT_LE(*b.range_m, spec.outlier_range_max_m);
    }
  }
  EXPECT_NEAR(static_cast<double>(replaced) / static_cast<double>(valid), 0.5, 0.03);
}

TEST(SceneSpecTest, ValidationErrors) {
  auto bad = [](auto mutate) {
    SceneSpec s;
    mutate(s);
    EXPECT_THROW(generate(s), std::invalid_argument);
  };
  bad([](SceneSpec& s) { s.rows = 0; });
  bad([](SceneSpec& s) { s.columns = 0; });
  bad([](SceneSpec& s) { s.elevation_max_rad = s.elevation_min_rad; });
  bad([](SceneSpec& s) { s.outlier_rate = 1.0; });
  bad([](SceneSpec& s) { s.dropout_rate = -0.1; });
  bad([](SceneSpec& s) { s.epsilon_camera = 1.0; });
  bad([](SceneSpec& s) { s.boxes = {{0.0, 0.1, 5.0, 1.0, "road"}}; });
  bad([](SceneSpec& s) { s.boxes = {{0.2, 0.1, 5.0, 1.0, "person"}}; });
  bad([](SceneSpec& s) { s.ground_bands = {{10.0, "person"}}; });
  bad([](SceneSpec& s) { s.azimuth_max_rad = 4.0; });
}

TEST(SceneSpecTest, GridHelpers) {
  SceneSpec s;
  EXPECT_NEAR(row_elevation(s, 0), -25.0 * kDeg, 1e-15);
  EXPECT_NEAR(row_elevation(s, s.rows - 1), 15.0 * kDeg, 1e-15);
  EXPECT_NEAR(column_azimuth(s, 0), -std::numbers::pi + std::numbers::pi / 360.0, 1e-15);
}

}  // namespace
}  // namespace stixels
