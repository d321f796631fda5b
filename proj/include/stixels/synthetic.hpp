#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "stixels/metrics.hpp"
#include "stixels/model.hpp"

namespace stixels {

/// Obstacle face at a constant slant range from the sensor, standing on the
/// ground plane and reaching `height_m` above it, over an azimuth interval.
struct BoxObstacle {
  double azimuth_min_rad = 0.0;
  double azimuth_max_rad = 0.0;
  double range_m = 10.0;
  double height_m = 1.5;
  std::string label = "small_vehicle";
};

/// Ground label used up to `until_m` horizontal distance.
struct GroundBand {
  double until_m = std::numeric_limits<double>::infinity();
  std::string label = "road";
};

struct SceneSpec {
  double sensor_height_m = 1.8;

  std::size_t rows = 64;
  double elevation_min_rad = -25.0 * std::numbers::pi / 180.0;
  double elevation_max_rad = 15.0 * std::numbers::pi / 180.0;

  std::size_t columns = 360;
  double azimuth_min_rad = -std::numbers::pi;
  double azimuth_max_rad = std::numbers::pi;

  /// Ground exists up to this horizontal distance.
  double ground_extent_m = std::numeric_limits<double>::infinity();
  /// Ascending `until_m`; the last band covers everything beyond. Empty means
  /// road everywhere.
  std::vector<GroundBand> ground_bands;
  std::vector<BoxObstacle> boxes;

  double sigma_range_m = 0.0;
  double sigma_height_m = 0.0;
  double outlier_rate = 0.0;
  double outlier_range_max_m = 100.0;
  double dropout_rate = 0.0;
  double epsilon_lidar = 0.0;
  double epsilon_camera = 0.0;

  double camera_fov_min_rad = -std::numbers::pi / 4;
  double camera_fov_max_rad = std::numbers::pi / 4;

  std::uint64_t seed = 0;

  /// Shared by both sensor domains and the stixels.
  ClassSet classes = default_class_set();

  /// Throws std::invalid_argument naming the first bad field.
  void validate() const;
};

struct SyntheticScene {
  Scan scan;
  StixelWorld truth;
  PointLabels labels;
};

/// Casts one ray per (row, column) against the ground plane and the boxes.
/// Deterministic for a given spec, seed included.
SyntheticScene generate(const SceneSpec& spec);

/// Azimuth of column `i` (cell centres over the azimuth interval).
double column_azimuth(const SceneSpec& spec, std::size_t i);
/// Elevation of row `j` (inclusive linear grid).
double row_elevation(const SceneSpec& spec, std::size_t j);

/// A 360-degree street scene: road, sidewalk and terrain bands, vehicles,
/// pedestrians, poles, vegetation and buildings, without noise.
SceneSpec urban_scene();

/// urban_scene() with the given noise levels and seed.
SceneSpec noisy_urban_scene(double sigma_range_m, double outlier_rate,
                            double dropout_rate, double epsilon,
                            std::uint64_t seed);

}  // namespace stixels
