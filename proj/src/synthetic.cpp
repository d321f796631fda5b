#include "stixels/synthetic.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace stixels {

namespace {

constexpr double deg(double d) { return d * std::numbers::pi / 180.0; }

// What a ray hit: the ground band, a box, or nothing.
struct Hit {
  enum class Kind { Ground, Box, None } kind = Kind::None;
  std::size_t index = 0;
  double range_m = std::numeric_limits<double>::infinity();

  bool same_surface(const Hit& o) const { return kind == o.kind && index == o.index; }
};

std::size_t require_label(const ClassSet& classes, const std::string& name,
                          const char* where) {
  auto idx = classes.index_of(name);
  if (!idx) {
    throw std::invalid_argument(std::string(where) + ": unknown label '" + name + "'");
  }
  return *idx;
}

Eigen::VectorXd confused_distribution(std::size_t n, std::size_t truth, double epsilon) {
  Eigen::VectorXd p;
  if (n == 1) {
    p = Eigen::VectorXd::Ones(1);
    return p;
  }
  p = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n),
                                epsilon / static_cast<double>(n - 1));
  p[static_cast<Eigen::Index>(truth)] = 1.0 - epsilon;
  return p;
}

bool in_azimuth(double az, double lo, double hi) { return az >= lo && az <= hi; }

}  // namespace

double column_azimuth(const SceneSpec& spec, std::size_t i) {
  const double span = spec.azimuth_max_rad - spec.azimuth_min_rad;
  return spec.azimuth_min_rad +
         (static_cast<double>(i) + 0.5) * span / static_cast<double>(spec.columns);
}

double row_elevation(const SceneSpec& spec, std::size_t j) {
  if (spec.rows == 1) return spec.elevation_min_rad;
  const double step =
      (spec.elevation_max_rad - spec.elevation_min_rad) / static_cast<double>(spec.rows - 1);
  return spec.elevation_min_rad + static_cast<double>(j) * step;
}

void SceneSpec::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument("SceneSpec: " + what);
  };
  const double pi = std::numbers::pi;
  require(sensor_height_m > 0 && std::isfinite(sensor_height_m), "sensor_height_m must be > 0");
  require(rows >= 1, "rows must be >= 1");
  require(columns >= 1, "columns must be >= 1");
  require(elevation_min_rad >= -pi / 2 && elevation_max_rad <= pi / 2 &&
              (rows == 1 ? elevation_min_rad <= elevation_max_rad
                         : elevation_min_rad < elevation_max_rad),
          "elevation grid must be increasing within [-90, 90] degrees");
  require(azimuth_min_rad >= -pi && azimuth_max_rad <= pi &&
              azimuth_min_rad < azimuth_max_rad,
          "azimuth grid must be increasing within [-180, 180] degrees");
  require(ground_extent_m > 0, "ground_extent_m must be > 0");
  for (std::size_t i = 0; i < ground_bands.size(); ++i) {
    require(ground_bands[i].until_m > 0, "ground band limits must be > 0");
    require(i == 0 || ground_bands[i].until_m > ground_bands[i - 1].until_m,
            "ground bands must be ascending");
    auto idx = classes.index_of(ground_bands[i].label);
    require(idx && classes.structural_of(*idx) == StructuralClass::Ground,
            "ground band label '" + ground_bands[i].label + "' is not a ground class");
  }
  for (const auto& b : boxes) {
    require(b.azimuth_min_rad <= b.azimuth_max_rad, "box azimuth span is reversed");
    require(b.range_m > 0 && b.height_m > 0, "box range and height must be > 0");
    auto idx = classes.index_of(b.label);
    require(idx && classes.structural_of(*idx) == StructuralClass::Object,
            "box label '" + b.label + "' is not an object class");
  }
  auto rate = [](double v) { return v >= 0 && v < 1; };
  require(sigma_range_m >= 0 && sigma_height_m >= 0, "noise levels must be >= 0");
  require(rate(outlier_rate), "outlier_rate must lie in [0, 1)");
  require(rate(dropout_rate), "dropout_rate must lie in [0, 1)");
  require(rate(epsilon_lidar) && rate(epsilon_camera), "epsilon must lie in [0, 1)");
  require(outlier_range_max_m > 0, "outlier_range_max_m must be > 0");
  auto sky = classes.index_of("sky");
  require(sky && classes.structural_of(*sky) == StructuralClass::Sky,
          "class set needs a 'sky' label of structural class sky");
  if (ground_bands.empty()) {
    auto road = classes.index_of("road");
    require(road && classes.structural_of(*road) == StructuralClass::Ground,
            "class set needs a ground 'road' label when no ground bands are given");
  }
}

SyntheticScene generate(const SceneSpec& spec) {
  spec.validate();
  const ClassSet& classes = spec.classes;
  const std::size_t n_labels = classes.size();
  const std::size_t sky_label = require_label(classes, "sky", "scene");

  std::vector<GroundBand> bands = spec.ground_bands;
  if (bands.empty()) bands.push_back(GroundBand{});
  std::vector<std::size_t> band_labels, box_labels;
  for (const auto& b : bands) band_labels.push_back(require_label(classes, b.label, "band"));
  for (const auto& b : spec.boxes) box_labels.push_back(require_label(classes, b.label, "box"));

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  SyntheticScene out;
  out.scan.classes = ScanClasses::identity(classes);
  out.truth.height = spec.rows;
  out.truth.classes = classes;
  out.labels.classes = classes;

  const double H = spec.sensor_height_m;
  for (std::size_t c = 0; c < spec.columns; ++c) {
    const double az = column_azimuth(spec, c);
    const bool in_camera = in_azimuth(az, spec.camera_fov_min_rad, spec.camera_fov_max_rad);
    ScanColumn column;
    column.azimuth_rad = az;
    std::vector<Hit> hits(spec.rows);
    std::vector<std::size_t> labels(spec.rows);

    for (std::size_t j = 0; j < spec.rows; ++j) {
      const double el = row_elevation(spec, j);
      Hit hit;
      if (el < 0.0) {
        const double horizontal = H / std::tan(-el);
        if (horizontal <= spec.ground_extent_m) {
          hit.kind = Hit::Kind::Ground;
          hit.range_m = H / std::sin(-el);
          hit.index = bands.size() - 1;
          for (std::size_t b = 0; b < bands.size(); ++b) {
            if (horizontal <= bands[b].until_m) {
              hit.index = b;
              break;
            }
          }
        }
      }
      for (std::size_t b = 0; b < spec.boxes.size(); ++b) {
        const auto& box = spec.boxes[b];
        if (!in_azimuth(az, box.azimuth_min_rad, box.azimuth_max_rad)) continue;
        const double height = box.range_m * std::sin(el) + H;
        if (height < 0.0 || height > box.height_m) continue;
        if (box.range_m < hit.range_m) {
          hit.kind = Hit::Kind::Box;
          hit.index = b;
          hit.range_m = box.range_m;
        }
      }
      hits[j] = hit;
      labels[j] = hit.kind == Hit::Kind::Ground ? band_labels[hit.index]
                  : hit.kind == Hit::Kind::Box  ? box_labels[hit.index]
                                                : sky_label;

      // Every point draws the same random values so noise streams stay
      // aligned when rates change.
      const double u_drop = unit(rng);
      const double u_out = unit(rng);
      const double outlier_range = spec.outlier_range_max_m * (1.0 - unit(rng));
      const double n_range = normal(rng);
      const double n_height = normal(rng);

      Measurement m;
      if (hit.kind == Hit::Kind::None || u_drop < spec.dropout_rate) {
        m.depth = PolarDepth::invalid(az, el);
      } else {
        double r = hit.range_m;
        if (hit.kind == Hit::Kind::Ground && spec.sigma_height_m > 0.0) {
          r = (H - spec.sigma_height_m * n_height) / std::sin(-el);
        }
        r += spec.sigma_range_m * n_range;
        if (u_out < spec.outlier_rate) r = outlier_range;
        m.depth = PolarDepth::measured(std::max(r, 1e-3), az, el);
      }
      m.lidar_sem = confused_distribution(n_labels, labels[j], spec.epsilon_lidar);
      if (in_camera) {
        m.cam_sem = confused_distribution(n_labels, labels[j], spec.epsilon_camera);
      }
      column.cells.push_back(std::move(m));
    }

    StixelColumn truth;
    truth.column = c;
    for (std::size_t j = 0; j < spec.rows;) {
      std::size_t top = j;
      while (top + 1 < spec.rows && hits[top + 1].same_surface(hits[j])) ++top;
      Stixel s;
      s.bottom = j;
      s.top = top;
      s.label = labels[j];
      s.sclass = classes.structural_of(labels[j]);
      switch (hits[j].kind) {
        case Hit::Kind::Ground:
          s.distance = StixelDistance::finite(H / std::tan(-row_elevation(spec, top)));
          break;
        case Hit::Kind::Box:
          s.distance = StixelDistance::finite(spec.boxes[hits[j].index].range_m);
          break;
        case Hit::Kind::None:
          s.distance = StixelDistance::infinite();
          break;
      }
      truth.stixels.push_back(s);
      j = top + 1;
    }
    out.truth.columns.push_back(std::move(truth));

    std::vector<std::optional<std::size_t>> ref(labels.begin(), labels.end());
    out.labels.columns.push_back(std::move(ref));
    out.scan.columns.push_back(std::move(column));
  }
  return out;
}

SceneSpec urban_scene() {
  SceneSpec s;
  s.ground_bands = {{11.0, "road"}, {16.0, "sidewalk"},
                    {std::numeric_limits<double>::infinity(), "terrain"}};
  s.boxes = {
      {deg(8), deg(28), 8.0, 1.5, "small_vehicle"},
      {deg(4), deg(32), 35.0, 9.0, "construction"},
      {deg(-28), deg(-14), 12.0, 1.6, "small_vehicle"},
      {deg(-6), deg(-2), 6.0, 1.8, "person"},
      {deg(-12), deg(-9), 14.0, 1.7, "rider"},
      {deg(34), deg(37), 5.0, 4.5, "pole"},
      {deg(40), deg(56), 18.0, 5.0, "vegetation"},
      {deg(62), deg(86), 15.0, 3.2, "large_vehicle"},
      {deg(-40), deg(-33), 9.0, 1.2, "two_wheeler"},
      {deg(-90), deg(-42), 22.0, 12.0, "construction"},
      {deg(100), deg(170), 30.0, 15.0, "construction"},
      {deg(-170), deg(-100), 25.0, 10.0, "construction"},
      {deg(-135), deg(-120), 10.0, 1.5, "small_vehicle"},
      {deg(120), deg(124), 7.0, 3.0, "traffic_sign"},
  };
  return s;
}

SceneSpec noisy_urban_scene(double sigma_range_m, double outlier_rate,
                            double dropout_rate, double epsilon, std::uint64_t seed) {
  SceneSpec s = urban_scene();
  s.sigma_range_m = sigma_range_m;
  s.outlier_rate = outlier_rate;
  s.dropout_rate = dropout_rate;
  s.epsilon_lidar = epsilon;
  s.epsilon_camera = epsilon;
  s.seed = seed;
  return s;
}

}  // namespace stixels
