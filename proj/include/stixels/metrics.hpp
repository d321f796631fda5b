#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stixels/model.hpp"

namespace stixels {

/// Reference label per point, [column][row], indexing the stixel ClassSet.
/// nullopt marks an unlabeled point.
struct PointLabels {
  std::vector<std::vector<std::optional<std::size_t>>> columns;
  ClassSet classes;
};

enum class OutlierDenominator : std::uint8_t { ValidPoints, AllPoints };

struct OutlierOptions {
  double threshold = 0.05;
  OutlierDenominator denominator = OutlierDenominator::ValidPoints;
  /// Height of the sensor above the ideal ground plane, for ground stixels.
  double sensor_height_m = 1.8;
};

/// Fraction of points whose range deviates from their covering stixel by more
/// than `threshold` relative to the measured range. Ground stixels predict the
/// plane intersection along the point's ray; sky stixels over a valid point
/// always count. Throws std::invalid_argument on mismatched shapes.
double outlier_rate(const Scan& scan, const StixelWorld& world,
                    const OutlierOptions& options = {});

struct IouResult {
  /// Keyed by stixel label index; only classes seen in reference or prediction.
  std::map<std::size_t, double> per_class;
  double mean = 0.0;
};

/// Point-wise intersection over union of the covering stixel's label against
/// the reference. Unlabeled reference points are skipped.
IouResult iou(const PointLabels& reference, const StixelWorld& world);

/// 1 - n_stixels / n_points, counting invalid points too.
double compression_rate(const StixelWorld& world, const Scan& scan);

struct EvalReport {
  double outlier_rate = 0.0;
  /// In stixel label order.
  std::vector<std::pair<std::string, double>> iou_per_class;
  double mean_iou = 0.0;
  double compression_rate = 0.0;
  std::size_t points = 0;
  std::size_t valid_points = 0;
  std::size_t stixels = 0;
};

EvalReport evaluate(const Scan& scan, const StixelWorld& world,
                    const PointLabels& reference, const OutlierOptions& options = {});

}  // namespace stixels
