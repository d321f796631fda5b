#include "stixels/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "stixels/prior.hpp"

namespace stixels {

namespace {

void require_cover(const Scan& scan, const StixelWorld& world) {
  if (world.columns.size() != scan.columns.size()) {
    throw std::invalid_argument("world has " + std::to_string(world.columns.size()) +
                                " columns, scan has " + std::to_string(scan.columns.size()));
  }
  for (std::size_t c = 0; c < world.columns.size(); ++c) {
    if (auto v = consistency_check(world.columns[c], scan.columns[c].height())) {
      throw std::invalid_argument("world column " + std::to_string(c) + ": " + *v);
    }
  }
}

bool is_outlier(const PolarDepth& d, const Stixel& s, const OutlierOptions& o) {
  const double r = *d.range_m;
  double predicted = 0.0;
  switch (s.sclass) {
    case StructuralClass::Sky:
      return true;
    case StructuralClass::Object:
      if (!s.distance.is_finite()) return true;
      predicted = s.distance.meters();
      break;
    case StructuralClass::Ground:
      // Range at which this ray meets the ideal ground plane.
      if (d.elevation_rad >= 0.0) return true;
      predicted = o.sensor_height_m / std::sin(-d.elevation_rad);
      break;
  }
  return std::abs(r - predicted) / r > o.threshold;
}

}  // namespace

double outlier_rate(const Scan& scan, const StixelWorld& world,
                    const OutlierOptions& options) {
  require_cover(scan, world);
  std::size_t outliers = 0;
  std::size_t valid = 0;
  for (std::size_t c = 0; c < scan.columns.size(); ++c) {
    for (const Stixel& s : world.columns[c].stixels) {
      for (std::size_t j = s.bottom; j <= s.top; ++j) {
        const PolarDepth& d = scan.columns[c].cells[j].depth;
        if (!d.valid()) continue;
        ++valid;
        if (is_outlier(d, s, options)) ++outliers;
      }
    }
  }
  const std::size_t denominator =
      options.denominator == OutlierDenominator::ValidPoints ? valid : scan.num_points();
  return denominator == 0 ? 0.0
                          : static_cast<double>(outliers) / static_cast<double>(denominator);
}

IouResult iou(const PointLabels& reference, const StixelWorld& world) {
  const std::size_t n_labels = reference.classes.size();
  if (reference.columns.size() != world.columns.size()) {
    throw std::invalid_argument("reference labels and world differ in column count");
  }
  if (!(reference.classes == world.classes)) {
    throw std::invalid_argument("reference labels and world use different class sets");
  }
  std::vector<std::size_t> tp(n_labels, 0), fp(n_labels, 0), fn(n_labels, 0);
  for (std::size_t c = 0; c < world.columns.size(); ++c) {
    const auto& ref = reference.columns[c];
    if (ref.size() != world.height) {
      throw std::invalid_argument("reference column " + std::to_string(c) +
                                  " has the wrong height");
    }
    for (const Stixel& s : world.columns[c].stixels) {
      for (std::size_t j = s.bottom; j <= s.top; ++j) {
        if (!ref[j]) continue;
        const std::size_t truth = *ref[j];
        if (truth >= n_labels || s.label >= n_labels) {
          throw std::invalid_argument("label index outside the class set");
        }
        if (truth == s.label) {
          ++tp[truth];
        } else {
          ++fn[truth];
          ++fp[s.label];
        }
      }
    }
  }
  IouResult out;
  double sum = 0.0;
  for (std::size_t l = 0; l < n_labels; ++l) {
    const std::size_t denom = tp[l] + fp[l] + fn[l];
    if (denom == 0) continue;
    const double v = static_cast<double>(tp[l]) / static_cast<double>(denom);
    out.per_class[l] = v;
    sum += v;
  }
  out.mean = out.per_class.empty() ? 0.0 : sum / static_cast<double>(out.per_class.size());
  return out;
}

double compression_rate(const StixelWorld& world, const Scan& scan) {
  const std::size_t points = scan.num_points();
  if (points == 0) throw std::invalid_argument("compression_rate: scan has no points");
  return 1.0 - static_cast<double>(world.num_stixels()) / static_cast<double>(points);
}

EvalReport evaluate(const Scan& scan, const StixelWorld& world,
                    const PointLabels& reference, const OutlierOptions& options) {
  EvalReport r;
  r.outlier_rate = outlier_rate(scan, world, options);
  const IouResult i = iou(reference, world);
  for (const auto& [label, v] : i.per_class) {
    r.iou_per_class.emplace_back(reference.classes.name(label), v);
  }
  r.mean_iou = i.mean;
  r.compression_rate = compression_rate(world, scan);
  r.points = scan.num_points();
  for (const auto& col : scan.columns) {
    for (const auto& m : col.cells) r.valid_points += m.depth.valid() ? 1 : 0;
  }
  r.stixels = world.num_stixels();
  return r;
}

}  // namespace stixels
