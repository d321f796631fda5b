#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace stixels {

/// Structural class of a stixel: support surface, vertical obstacle, or no return.
enum class StructuralClass : std::uint8_t { Ground, Object, Sky };

inline constexpr std::size_t kNumStructuralClasses = 3;

std::string_view to_string(StructuralClass c);
std::optional<StructuralClass> structural_class_from_string(std::string_view s);

/// One LiDAR return in polar form. An invalid return (no reflection) still
/// carries both angles.
struct PolarDepth {
  std::optional<double> range_m;
  double azimuth_rad = 0.0;
  double elevation_rad = 0.0;

  bool valid() const { return range_m.has_value(); }

  static PolarDepth measured(double range_m, double azimuth_rad,
                             double elevation_rad) {
    return {range_m, azimuth_rad, elevation_rad};
  }
  static PolarDepth invalid(double azimuth_rad, double elevation_rad) {
    return {std::nullopt, azimuth_rad, elevation_rad};
  }
};

/// Class probabilities over a ClassSet, or nullopt when the modality has no
/// opinion for this point (e.g. outside the camera field of view).
using SemanticDistribution = std::optional<Eigen::VectorXd>;

struct Measurement {
  PolarDepth depth;
  SemanticDistribution lidar_sem;
  SemanticDistribution cam_sem;
};

/// Measurements of one scan column ordered bottom to top.
struct ScanColumn {
  std::vector<Measurement> cells;
  double azimuth_rad = 0.0;

  std::size_t height() const { return cells.size(); }
};

/// Ordered semantic label names, each tied to one structural class.
class ClassSet {
 public:
  ClassSet() = default;
  /// Throws std::invalid_argument on duplicate names or size mismatch.
  ClassSet(std::vector<std::string> names,
           std::vector<StructuralClass> structural);

  /// road, sidewalk and terrain map to Ground, sky to Sky, everything else
  /// to Object.
  static ClassSet with_default_structure(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t label) const { return names_.at(label); }
  StructuralClass structural_of(std::size_t label) const {
    return structural_.at(label);
  }
  std::optional<std::size_t> index_of(std::string_view name) const;
  const std::vector<std::string>& names() const { return names_; }

  /// Copy with one label reassigned to another structural class.
  ClassSet with_override(std::string_view name, StructuralClass c) const;

  /// Labels whose structural class is `c`, in label order.
  std::vector<std::size_t> labels_of(StructuralClass c) const;

  bool operator==(const ClassSet&) const = default;

 private:
  std::vector<std::string> names_;
  std::vector<StructuralClass> structural_;
};

/// The 13-label urban set: road, sidewalk, person, rider, small_vehicle,
/// large_vehicle, two_wheeler, construction, pole, traffic_sign, vegetation,
/// terrain, sky.
ClassSet default_class_set();

/// Row-stochastic map from `from` onto `to` matching labels by name.
/// Throws std::invalid_argument if a name of `from` is missing in `to`.
Eigen::MatrixXd identity_class_map(const ClassSet& from, const ClassSet& to);

/// The three class sets of a scan together with the maps from each sensor
/// domain onto the stixel labels. Map rows index the sensor classes, columns
/// the stixel classes.
struct ScanClasses {
  ClassSet lidar;
  ClassSet camera;
  ClassSet stixel;
  Eigen::MatrixXd lidar_map;
  Eigen::MatrixXd camera_map;

  static ScanClasses identity(const ClassSet& set);
};

struct Scan {
  std::vector<ScanColumn> columns;
  ScanClasses classes;

  std::size_t height() const {
    return columns.empty() ? 0 : columns.front().height();
  }
  std::size_t num_points() const { return columns.size() * height(); }
};

/// Stixel distance: finite meters, the sky sentinel, or none when the
/// segment holds no valid return.
class StixelDistance {
 public:
  enum class Kind : std::uint8_t { Finite, Infinite, None };

  static StixelDistance finite(double meters) { return {Kind::Finite, meters}; }
  static StixelDistance infinite() {
    return {Kind::Infinite, std::numeric_limits<double>::infinity()};
  }
  static StixelDistance none() {
    return {Kind::None, std::numeric_limits<double>::quiet_NaN()};
  }

  Kind kind() const { return kind_; }
  bool is_finite() const { return kind_ == Kind::Finite; }
  double meters() const { return meters_; }

  bool operator==(const StixelDistance& o) const {
    return kind_ == o.kind_ && (kind_ != Kind::Finite || meters_ == o.meters_);
  }

 private:
  StixelDistance(Kind k, double m) : kind_(k), meters_(m) {}
  Kind kind_;
  double meters_;
};

/// Rows are 0-based and inclusive: a stixel covers rows bottom..top.
struct Stixel {
  std::size_t bottom = 0;
  std::size_t top = 0;
  StixelDistance distance = StixelDistance::none();
  std::size_t label = 0;
  StructuralClass sclass = StructuralClass::Object;

  std::size_t size() const { return top - bottom + 1; }
  bool operator==(const Stixel&) const = default;
};

struct StixelColumn {
  std::vector<Stixel> stixels;
  std::size_t column = 0;

  bool operator==(const StixelColumn&) const = default;
};

struct StixelWorld {
  std::vector<StixelColumn> columns;
  /// Per-column minimal energy; empty when unknown (e.g. a ground truth world).
  std::vector<double> energies;
  std::size_t height = 0;
  ClassSet classes;

  std::size_t num_stixels() const;
  /// Covering stixel of (column, row). Assumes a consistent world.
  const Stixel& stixel_at(std::size_t column, std::size_t row) const;
};

/// Every tunable of the energy model. Angles in radians, lengths in meters.
struct ModelParams {
  double w_geo = 1.0;
  double w_sem_lidar = 1.0;
  double w_sem_cam = 1.0;
  double mc_cost = 8.0;

  double sigma_range_m = 0.05;
  double sigma_height_m = 0.1;
  double outlier_rate = 0.4;
  double outlier_range_max_m = 100.0;

  double grad_steep = 1.0;
  double grad_shift = 0.5;
  double sens_scale = 20.0;
  double sens_shift = 0.1;

  double sensor_height_m = 1.8;

  /// Throws std::invalid_argument naming the first violated bound.
  void validate() const;

  bool operator==(const ModelParams&) const = default;
};

struct Violation {
  std::optional<std::size_t> column;
  std::optional<std::size_t> row;
  std::string rule;
  std::string detail;
};

/// Lists every broken invariant of a scan; empty means well-formed.
std::vector<Violation> validate_scan(const Scan& scan);

}  // namespace stixels
