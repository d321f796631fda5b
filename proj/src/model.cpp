#include "stixels/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_set>

namespace stixels {

std::string_view to_string(StructuralClass c) {
  switch (c) {
    case StructuralClass::Ground:
      return "ground";
    case StructuralClass::Object:
      return "object";
    case StructuralClass::Sky:
      return "sky";
  }
  return "?";
}

std::optional<StructuralClass> structural_class_from_string(std::string_view s) {
  if (s == "ground") return StructuralClass::Ground;
  if (s == "object") return StructuralClass::Object;
  if (s == "sky") return StructuralClass::Sky;
  return std::nullopt;
}

ClassSet::ClassSet(std::vector<std::string> names,
                   std::vector<StructuralClass> structural)
    : names_(std::move(names)), structural_(std::move(structural)) {
  if (names_.size() != structural_.size()) {
    throw std::invalid_argument("ClassSet: every label needs a structural class");
  }
  std::unordered_set<std::string> seen;
  for (const auto& n : names_) {
    if (n.empty()) throw std::invalid_argument("ClassSet: empty label name");
    if (!seen.insert(n).second) {
      throw std::invalid_argument("ClassSet: duplicate label '" + n + "'");
    }
  }
}

ClassSet ClassSet::with_default_structure(std::vector<std::string> names) {
  std::vector<StructuralClass> structural;
  structural.reserve(names.size());
  for (const auto& n : names) {
    if (n == "road" || n == "sidewalk" || n == "terrain") {
      structural.push_back(StructuralClass::Ground);
    } else if (n == "sky") {
      structural.push_back(StructuralClass::Sky);
    } else {
      structural.push_back(StructuralClass::Object);
    }
  }
  return ClassSet(std::move(names), std::move(structural));
}

std::optional<std::size_t> ClassSet::index_of(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names_.begin());
}

ClassSet ClassSet::with_override(std::string_view name, StructuralClass c) const {
  auto idx = index_of(name);
  if (!idx) {
    throw std::invalid_argument("ClassSet: unknown label '" + std::string(name) + "'");
  }
  ClassSet copy = *this;
  copy.structural_[*idx] = c;
  return copy;
}

std::vector<std::size_t> ClassSet::labels_of(StructuralClass c) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < structural_.size(); ++i) {
    if (structural_[i] == c) out.push_back(i);
  }
  return out;
}

ClassSet default_class_set() {
  return ClassSet::with_default_structure(
      {"road", "sidewalk", "person", "rider", "small_vehicle", "large_vehicle",
       "two_wheeler", "construction", "pole", "traffic_sign", "vegetation",
       "terrain", "sky"});
}

Eigen::MatrixXd identity_class_map(const ClassSet& from, const ClassSet& to) {
  Eigen::MatrixXd map = Eigen::MatrixXd::Zero(
      static_cast<Eigen::Index>(from.size()), static_cast<Eigen::Index>(to.size()));
  for (std::size_t i = 0; i < from.size(); ++i) {
    auto j = to.index_of(from.name(i));
    if (!j) {
      throw std::invalid_argument("class map: label '" + from.name(i) +
                                  "' has no counterpart in the stixel classes");
    }
    map(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(*j)) = 1.0;
  }
  return map;
}

ScanClasses ScanClasses::identity(const ClassSet& set) {
  Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(
      static_cast<Eigen::Index>(set.size()), static_cast<Eigen::Index>(set.size()));
  return {set, set, set, eye, eye};
}

std::size_t StixelWorld::num_stixels() const {
  std::size_t n = 0;
  for (const auto& c : columns) n += c.stixels.size();
  return n;
}

const Stixel& StixelWorld::stixel_at(std::size_t column, std::size_t row) const {
  const auto& stx = columns.at(column).stixels;
  auto it = std::partition_point(stx.begin(), stx.end(),
                                 [row](const Stixel& s) { return s.top < row; });
  if (it == stx.end()) throw std::out_of_range("no stixel covers the row");
  return *it;
}

void ModelParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("ModelParams: ") + what);
  };
  auto finite = [](double v) { return std::isfinite(v); };
  require(finite(w_geo) && w_geo >= 0, "w_geo must be finite and >= 0");
  require(finite(w_sem_lidar) && w_sem_lidar >= 0,
          "w_sem_lidar must be finite and >= 0");
  require(finite(w_sem_cam) && w_sem_cam >= 0, "w_sem_cam must be finite and >= 0");
  require(finite(mc_cost) && mc_cost >= 0, "mc_cost must be finite and >= 0");
  require(finite(sigma_range_m) && sigma_range_m > 0, "sigma_range_m must be > 0");
  require(finite(sigma_height_m) && sigma_height_m > 0, "sigma_height_m must be > 0");
  require(finite(outlier_rate) && outlier_rate >= 0 && outlier_rate < 1,
          "outlier_rate must lie in [0, 1)");
  require(finite(outlier_range_max_m) && outlier_range_max_m > 0,
          "outlier_range_max_m must be > 0");
  require(finite(grad_steep) && grad_steep > 0, "grad_steep must be > 0");
  require(finite(grad_shift), "grad_shift must be finite");
  require(finite(sens_scale) && sens_scale > 0, "sens_scale must be > 0");
  require(finite(sens_shift), "sens_shift must be finite");
  require(finite(sensor_height_m) && sensor_height_m > 0,
          "sensor_height_m must be > 0");
}

namespace {

void check_distribution(const SemanticDistribution& sem, std::size_t expected,
                        std::size_t col, std::size_t row, const char* which,
                        std::vector<Violation>& out) {
  if (!sem) return;
  if (static_cast<std::size_t>(sem->size()) != expected) {
    out.push_back({col, row, "SemanticDistribution length",
                   std::string(which) + " distribution has " +
                       std::to_string(sem->size()) + " entries, class set has " +
                       std::to_string(expected)});
    return;
  }
  if (!sem->allFinite() || (sem->array() < 0.0).any() || (sem->array() > 1.0).any()) {
    out.push_back({col, row, "SemanticDistribution range",
                   std::string(which) + " probabilities must lie in [0, 1]"});
    return;
  }
  const double sum = sem->sum();
  if (std::abs(sum - 1.0) > 1e-6) {
    out.push_back({col, row, "SemanticDistribution sum",
                   std::string(which) + " probabilities sum to " + std::to_string(sum)});
  }
}

void check_class_map(const Eigen::MatrixXd& map, const ClassSet& from,
                     const ClassSet& to, const char* which,
                     std::vector<Violation>& out) {
  if (map.rows() != static_cast<Eigen::Index>(from.size()) ||
      map.cols() != static_cast<Eigen::Index>(to.size())) {
    out.push_back({std::nullopt, std::nullopt, "class map shape",
                   std::string(which) + " map must be " + std::to_string(from.size()) +
                       "x" + std::to_string(to.size())});
    return;
  }
  for (Eigen::Index i = 0; i < map.rows(); ++i) {
    const auto row = map.row(i);
    if ((row.array() < 0.0).any() || std::abs(row.sum() - 1.0) > 1e-6) {
      out.push_back({std::nullopt, std::nullopt, "class map row-stochastic",
                     std::string(which) + " map row " + std::to_string(i) +
                         " is not a probability distribution"});
    }
  }
}

}  // namespace

std::vector<Violation> validate_scan(const Scan& scan) {
  std::vector<Violation> out;
  const auto& cls = scan.classes;
  check_class_map(cls.lidar_map, cls.lidar, cls.stixel, "lidar", out);
  check_class_map(cls.camera_map, cls.camera, cls.stixel, "camera", out);

  const std::size_t h = scan.height();
  for (std::size_t c = 0; c < scan.columns.size(); ++c) {
    const auto& col = scan.columns[c];
    if (col.cells.empty()) {
      out.push_back({c, std::nullopt, "ScanColumn non-empty", "column has no cells"});
      continue;
    }
    if (col.height() != h) {
      out.push_back({c, std::nullopt, "Scan uniform height",
                     "column height " + std::to_string(col.height()) +
                         " differs from " + std::to_string(h)});
    }
    for (std::size_t r = 0; r < col.cells.size(); ++r) {
      const auto& m = col.cells[r];
      const auto& d = m.depth;
      if (d.range_m && !(std::isfinite(*d.range_m) && *d.range_m > 0)) {
        out.push_back({c, r, "PolarDepth range", "range must be finite and > 0"});
      }
      if (!std::isfinite(d.elevation_rad) ||
          std::abs(d.elevation_rad) > std::numbers::pi / 2) {
        out.push_back({c, r, "PolarDepth elevation", "elevation outside [-pi/2, pi/2]"});
      }
      if (!std::isfinite(d.azimuth_rad) || d.azimuth_rad <= -std::numbers::pi ||
          d.azimuth_rad > std::numbers::pi) {
        out.push_back({c, r, "PolarDepth azimuth", "azimuth outside (-pi, pi]"});
      }
      if (r > 0 && !(d.elevation_rad > col.cells[r - 1].depth.elevation_rad)) {
        out.push_back({c, r, "ScanColumn elevation order",
                       "elevation not strictly increasing bottom to top"});
      }
      if (d.valid() && !m.lidar_sem) {
        out.push_back({c, r, "Measurement lidar semantics",
                       "valid return without lidar semantics"});
      }
      check_distribution(m.lidar_sem, cls.lidar.size(), c, r, "lidar", out);
      check_distribution(m.cam_sem, cls.camera.size(), c, r, "camera", out);
    }
  }
  return out;
}

}  // namespace stixels
