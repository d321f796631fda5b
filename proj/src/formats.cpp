#include "stixels/formats.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include "stixels/prior.hpp"
#include "text_io.hpp"

namespace stixels {

using text::format_number;
using text::LineReader;

namespace {

constexpr int kVersion = 1;

void read_magic(LineReader& r, std::string_view kind) {
  if (!r.next()) r.fail_at_end("empty document, expected '" + std::string(kind) + "'");
  if (r.word(0) != kind) {
    r.fail(0, "expected '" + std::string(kind) + "', found '" + std::string(r.word(0)) + "'");
  }
  r.expect_count(2);
  if (r.count(1) != static_cast<std::size_t>(kVersion)) {
    r.fail(1, "unsupported " + std::string(kind) + " version " + std::string(r.word(1)));
  }
}

void write_magic(std::ostream& out, std::string_view kind) {
  out << kind << ' ' << kVersion << '\n';
}

std::string class_set_fields(const ClassSet& set) {
  std::string s;
  for (std::size_t i = 0; i < set.size(); ++i) {
    s += ' ';
    s += set.name(i);
    s += ':';
    s += to_string(set.structural_of(i));
  }
  return s;
}

ClassSet parse_class_set(const LineReader& r, std::size_t first) {
  std::vector<std::string> names;
  std::vector<StructuralClass> structural;
  for (std::size_t i = first; i < r.size(); ++i) {
    const auto w = r.word(i);
    const auto colon = w.rfind(':');
    if (colon == std::string_view::npos || colon == 0) {
      r.fail(i, "expected label:class, found '" + std::string(w) + "'");
    }
    auto c = structural_class_from_string(w.substr(colon + 1));
    if (!c) r.fail(i, "unknown structural class '" + std::string(w.substr(colon + 1)) + "'");
    names.emplace_back(w.substr(0, colon));
    structural.push_back(*c);
  }
  if (names.empty()) r.fail(first, "class set has no labels");
  try {
    return ClassSet(std::move(names), std::move(structural));
  } catch (const std::invalid_argument& e) {
    r.fail(first, e.what());
  }
}

template <typename Stream>
Stream open_file(const std::filesystem::path& path, std::ios::openmode mode) {
  Stream s(path, mode);
  if (!s) throw IoError("cannot open '" + path.string() + "'");
  return s;
}

template <typename T>
T read_file(const std::filesystem::path& path, T (*reader)(std::istream&)) {
  auto in = open_file<std::ifstream>(path, std::ios::in);
  return reader(in);
}

template <typename T>
void write_file(const std::filesystem::path& path, const T& value,
                void (*writer)(const T&, std::ostream&)) {
  auto out = open_file<std::ofstream>(path, std::ios::out | std::ios::trunc);
  writer(value, out);
  out.flush();
  if (!out) throw IoError("cannot write '" + path.string() + "'");
}

// Header fields shared by scan, world and label documents.
struct GridHeader {
  std::optional<std::size_t> height;
  std::optional<std::size_t> columns;
};

bool read_grid_field(LineReader& r, GridHeader& h) {
  const auto key = r.word(0);
  if (key == "height") {
    r.expect_count(2);
    h.height = r.count(1);
    if (*h.height == 0) r.fail(1, "height must be >= 1");
    return true;
  }
  if (key == "columns") {
    r.expect_count(2);
    h.columns = r.count(1);
    return true;
  }
  return false;
}

[[noreturn]] void missing_field(const LineReader& r, bool at_end, const std::string& field) {
  if (at_end) r.fail_at_end("missing header field '" + field + "'");
  r.fail(0, "missing header field '" + field + "'");
}

void write_distribution(std::ostream& out, const SemanticDistribution& sem) {
  if (!sem) {
    out << " absent";
    return;
  }
  for (Eigen::Index i = 0; i < sem->size(); ++i) out << ' ' << format_number((*sem)[i]);
}

// Parses "absent" or `n` probabilities starting at token `i`; advances `i`.
SemanticDistribution parse_distribution(const LineReader& r, std::size_t& i, std::size_t n) {
  if (r.word(i) == "absent") {
    ++i;
    return std::nullopt;
  }
  Eigen::VectorXd p(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) p[static_cast<Eigen::Index>(k)] = r.number(i++);
  return p;
}

bool is_identity_map(const Eigen::MatrixXd& map, const ClassSet& from, const ClassSet& to) {
  try {
    return identity_class_map(from, to) == map;
  } catch (const std::invalid_argument&) {
    return false;
  }
}

void write_map(std::ostream& out, const char* domain, const Eigen::MatrixXd& map,
               const ClassSet& from, const ClassSet& to) {
  if (is_identity_map(map, from, to)) {
    out << "map " << domain << " identity\n";
    return;
  }
  for (Eigen::Index i = 0; i < map.rows(); ++i) {
    out << "map " << domain << ' ' << from.name(static_cast<std::size_t>(i));
    for (Eigen::Index j = 0; j < map.cols(); ++j) out << ' ' << format_number(map(i, j));
    out << '\n';
  }
}

struct RawMap {
  bool identity = false;
  std::map<std::string, std::pair<std::size_t, std::vector<double>>> rows;  // name -> (line, values)
  std::size_t line = 0;
};

Eigen::MatrixXd build_map(const RawMap& raw, const ClassSet& from, const ClassSet& to,
                          const char* domain) {
  if (raw.identity) {
    try {
      return identity_class_map(from, to);
    } catch (const std::invalid_argument& e) {
      throw FormatError(raw.line, 1, std::string("map ") + domain + ": " + e.what());
    }
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(from.size()), static_cast<Eigen::Index>(to.size()));
  for (std::size_t i = 0; i < from.size(); ++i) {
    auto it = raw.rows.find(from.name(i));
    if (it == raw.rows.end()) {
      throw FormatError(raw.line, 1, std::string("map ") + domain + ": no row for label '" +
                                         from.name(i) + "'");
    }
    const auto& [line, values] = it->second;
    if (values.size() != to.size()) {
      throw FormatError(line, 1, std::string("map ") + domain + ": row '" + from.name(i) +
                                     "' needs " + std::to_string(to.size()) + " values");
    }
    for (std::size_t j = 0; j < values.size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[j];
    }
  }
  if (raw.rows.size() != from.size()) {
    throw FormatError(raw.line, 1, std::string("map ") + domain + ": rows for unknown labels");
  }
  return m;
}

std::string format_distance(const StixelDistance& d) {
  switch (d.kind()) {
    case StixelDistance::Kind::Finite:
      return format_number(d.meters());
    case StixelDistance::Kind::Infinite:
      return "inf";
    case StixelDistance::Kind::None:
      return "none";
  }
  return "none";
}

}  // namespace

// ---------------------------------------------------------------------------
// Scan

void write_scan(const Scan& scan, std::ostream& out) {
  const auto& cls = scan.classes;
  write_magic(out, "stixel-scan");
  out << "height " << scan.height() << '\n';
  out << "columns " << scan.columns.size() << '\n';
  out << "classes lidar" << class_set_fields(cls.lidar) << '\n';
  out << "classes camera" << class_set_fields(cls.camera) << '\n';
  out << "classes stixel" << class_set_fields(cls.stixel) << '\n';
  write_map(out, "lidar", cls.lidar_map, cls.lidar, cls.stixel);
  write_map(out, "camera", cls.camera_map, cls.camera, cls.stixel);
  for (std::size_t c = 0; c < scan.columns.size(); ++c) {
    const auto& col = scan.columns[c];
    out << "column " << c << ' ' << format_number(col.azimuth_rad) << '\n';
    for (const auto& m : col.cells) {
      out << "m " << (m.depth.valid() ? format_number(*m.depth.range_m) : "inv") << ' '
          << format_number(m.depth.azimuth_rad) << ' ' << format_number(m.depth.elevation_rad)
          << " lidar";
      write_distribution(out, m.lidar_sem);
      out << " cam";
      write_distribution(out, m.cam_sem);
      out << '\n';
    }
  }
}

Scan read_scan(std::istream& in) {
  LineReader r(in);
  read_magic(r, "stixel-scan");

  GridHeader grid;
  std::map<std::string, ClassSet> sets;
  RawMap lidar_map, camera_map;
  bool have_lidar_map = false, have_camera_map = false;
  bool at_end = true;
  while (r.next()) {
    const auto key = r.word(0);
    if (key == "column") {
      at_end = false;
      break;
    }
    if (read_grid_field(r, grid)) continue;
    if (key == "classes") {
      const auto domain = std::string(r.word(1));
      if (domain != "lidar" && domain != "camera" && domain != "stixel") {
        r.fail(1, "unknown class domain '" + domain + "'");
      }
      sets.insert_or_assign(domain, parse_class_set(r, 2));
    } else if (key == "map") {
      const auto domain = r.word(1);
      RawMap* raw = nullptr;
      if (domain == "lidar") {
        raw = &lidar_map;
        have_lidar_map = true;
      } else if (domain == "camera") {
        raw = &camera_map;
        have_camera_map = true;
      } else {
        r.fail(1, "unknown map domain '" + std::string(domain) + "'");
      }
      raw->line = r.line();
      if (r.word(2) == "identity") {
        r.expect_count(3);
        raw->identity = true;
      } else {
        std::vector<double> values;
        for (std::size_t i = 3; i < r.size(); ++i) values.push_back(r.number(i));
        raw->rows[std::string(r.word(2))] = {r.line(), std::move(values)};
      }
    } else {
      r.fail(0, "unknown header field '" + std::string(key) + "'");
    }
  }
  if (!grid.height) missing_field(r, at_end, "height");
  if (!grid.columns) missing_field(r, at_end, "columns");
  for (const char* d : {"lidar", "camera", "stixel"}) {
    if (!sets.count(d)) missing_field(r, at_end, std::string("classes ") + d);
  }
  if (!have_lidar_map) missing_field(r, at_end, "map lidar");
  if (!have_camera_map) missing_field(r, at_end, "map camera");

  Scan scan;
  scan.classes.lidar = sets["lidar"];
  scan.classes.camera = sets["camera"];
  scan.classes.stixel = sets["stixel"];
  scan.classes.lidar_map = build_map(lidar_map, scan.classes.lidar, scan.classes.stixel, "lidar");
  scan.classes.camera_map =
      build_map(camera_map, scan.classes.camera, scan.classes.stixel, "camera");

  const std::size_t n_lidar = scan.classes.lidar.size();
  const std::size_t n_camera = scan.classes.camera.size();
  scan.columns.reserve(*grid.columns);
  for (std::size_t c = 0; c < *grid.columns; ++c) {
    if (c > 0 && !r.next()) r.fail_at_end("expected column " + std::to_string(c));
    if (at_end) r.fail_at_end("expected column 0");
    if (r.word(0) != "column") r.fail(0, "expected 'column'");
    r.expect_count(3);
    if (r.count(1) != c) r.fail(1, "expected column index " + std::to_string(c));
    ScanColumn col;
    col.azimuth_rad = r.number(2);
    col.cells.reserve(*grid.height);
    for (std::size_t j = 0; j < *grid.height; ++j) {
      if (!r.next()) r.fail_at_end("expected measurement row " + std::to_string(j));
      if (r.word(0) != "m") r.fail(0, "expected 'm' measurement record");
      Measurement m;
      const double az = r.number(2);
      const double el = r.number(3);
      if (r.word(1) == "inv") {
        m.depth = PolarDepth::invalid(az, el);
      } else {
        const double range = r.number(1);
        if (!(range > 0) || !std::isfinite(range)) r.fail(1, "range must be finite and > 0");
        m.depth = PolarDepth::measured(range, az, el);
      }
      std::size_t i = 4;
      if (r.word(i) != "lidar") r.fail(i, "expected 'lidar'");
      ++i;
      m.lidar_sem = parse_distribution(r, i, n_lidar);
      if (r.word(i) != "cam") r.fail(i, "expected 'cam'");
      ++i;
      m.cam_sem = parse_distribution(r, i, n_camera);
      if (i != r.size()) r.fail(i, "unexpected trailing fields");
      col.cells.push_back(std::move(m));
    }
    scan.columns.push_back(std::move(col));
  }
  if (r.next()) r.fail(0, "unexpected content after the last column");
  return scan;
}

void write_scan(const Scan& scan, const std::filesystem::path& path) {
  write_file<Scan>(path, scan, &write_scan);
}

Scan read_scan(const std::filesystem::path& path) {
  return read_file<Scan>(path, &read_scan);
}

// ---------------------------------------------------------------------------
// World

void write_world(const StixelWorld& world, std::ostream& out) {
  for (std::size_t c = 0; c < world.columns.size(); ++c) {
    if (auto v = consistency_check(world.columns[c], world.height)) {
      throw std::invalid_argument("write_world: column " + std::to_string(c) + ": " + *v);
    }
  }
  write_magic(out, "stixel-world");
  out << "height " << world.height << '\n';
  out << "columns " << world.columns.size() << '\n';
  out << "classes stixel" << class_set_fields(world.classes) << '\n';
  const bool energies = world.energies.size() == world.columns.size();
  for (std::size_t c = 0; c < world.columns.size(); ++c) {
    const auto& col = world.columns[c];
    out << "column " << c << ' ' << (energies ? format_number(world.energies[c]) : "unknown")
        << ' ' << col.stixels.size() << '\n';
    for (const auto& s : col.stixels) {
      out << "s " << s.bottom << ' ' << s.top << ' ' << format_distance(s.distance) << ' '
          << world.classes.name(s.label) << ' ' << to_string(s.sclass) << '\n';
    }
  }
}

StixelWorld read_world(std::istream& in) {
  LineReader r(in);
  read_magic(r, "stixel-world");
  GridHeader grid;
  std::optional<ClassSet> classes;
  bool at_end = true;
  while (r.next()) {
    if (r.word(0) == "column") {
      at_end = false;
      break;
    }
    if (read_grid_field(r, grid)) continue;
    if (r.word(0) == "classes") {
      if (r.word(1) != "stixel") r.fail(1, "world documents carry only stixel classes");
      classes = parse_class_set(r, 2);
    } else {
      r.fail(0, "unknown header field '" + std::string(r.word(0)) + "'");
    }
  }
  if (!grid.height) missing_field(r, at_end, "height");
  if (!grid.columns) missing_field(r, at_end, "columns");
  if (!classes) missing_field(r, at_end, "classes stixel");

  StixelWorld world;
  world.height = *grid.height;
  world.classes = *classes;
  bool all_energies = true;
  for (std::size_t c = 0; c < *grid.columns; ++c) {
    if (c > 0 && !r.next()) r.fail_at_end("expected column " + std::to_string(c));
    if (at_end) r.fail_at_end("expected column 0");
    if (r.word(0) != "column") r.fail(0, "expected 'column'");
    r.expect_count(4);
    if (r.count(1) != c) r.fail(1, "expected column index " + std::to_string(c));
    if (r.word(2) == "unknown") {
      all_energies = false;
    } else {
      world.energies.push_back(r.number(2));
    }
    const std::size_t n = r.count(3);
    const std::size_t column_line = r.line();
    StixelColumn col;
    col.column = c;
    for (std::size_t i = 0; i < n; ++i) {
      if (!r.next()) r.fail_at_end("expected stixel record");
      if (r.word(0) != "s") r.fail(0, "expected 's' stixel record");
      r.expect_count(6);
      Stixel s;
      s.bottom = r.count(1);
      s.top = r.count(2);
      if (s.top < s.bottom) r.fail(2, "top row below bottom row");
      if (s.top >= world.height) r.fail(2, "top row beyond column height");
      auto label = world.classes.index_of(r.word(4));
      if (!label) r.fail(4, "unknown label '" + std::string(r.word(4)) + "'");
      s.label = *label;
      auto sclass = structural_class_from_string(r.word(5));
      if (!sclass) r.fail(5, "unknown structural class '" + std::string(r.word(5)) + "'");
      if (*sclass != world.classes.structural_of(s.label)) {
        r.fail(5, "structural class does not match label '" + world.classes.name(s.label) + "'");
      }
      s.sclass = *sclass;
      const auto d = r.word(3);
      if (d == "inf") {
        s.distance = StixelDistance::infinite();
      } else if (d == "none") {
        s.distance = StixelDistance::none();
      } else {
        const double v = r.number(3);
        if (!(v > 0)) r.fail(3, "distance must be > 0");
        s.distance = StixelDistance::finite(v);
      }
      const bool sky = s.sclass == StructuralClass::Sky;
      if (sky != (s.distance.kind() == StixelDistance::Kind::Infinite)) {
        r.fail(3, "only sky stixels have an infinite distance");
      }
      col.stixels.push_back(s);
    }
    if (auto v = consistency_check(col, world.height)) {
      throw FormatError(column_line, 1, "column " + std::to_string(c) + ": " + *v);
    }
    world.columns.push_back(std::move(col));
  }
  if (!all_energies) world.energies.clear();
  if (r.next()) r.fail(0, "unexpected content after the last column");
  return world;
}

void write_world(const StixelWorld& world, const std::filesystem::path& path) {
  write_file<StixelWorld>(path, world, &write_world);
}

StixelWorld read_world(const std::filesystem::path& path) {
  return read_file<StixelWorld>(path, &read_world);
}

// ---------------------------------------------------------------------------
// Point labels

void write_labels(const PointLabels& labels, std::ostream& out) {
  write_magic(out, "stixel-labels");
  const std::size_t h = labels.columns.empty() ? 0 : labels.columns.front().size();
  out << "height " << h << '\n';
  out << "columns " << labels.columns.size() << '\n';
  out << "classes stixel" << class_set_fields(labels.classes) << '\n';
  for (std::size_t c = 0; c < labels.columns.size(); ++c) {
    out << "column " << c;
    for (const auto& l : labels.columns[c]) {
      out << ' ' << (l ? labels.classes.name(*l) : std::string("unlabeled"));
    }
    out << '\n';
  }
}

PointLabels read_labels(std::istream& in) {
  LineReader r(in);
  read_magic(r, "stixel-labels");
  GridHeader grid;
  std::optional<ClassSet> classes;
  bool at_end = true;
  while (r.next()) {
    if (r.word(0) == "column") {
      at_end = false;
      break;
    }
    if (read_grid_field(r, grid)) continue;
    if (r.word(0) == "classes") {
      if (r.word(1) != "stixel") r.fail(1, "label documents carry only stixel classes");
      classes = parse_class_set(r, 2);
    } else {
      r.fail(0, "unknown header field '" + std::string(r.word(0)) + "'");
    }
  }
  if (!grid.height) missing_field(r, at_end, "height");
  if (!grid.columns) missing_field(r, at_end, "columns");
  if (!classes) missing_field(r, at_end, "classes stixel");

  PointLabels labels;
  labels.classes = *classes;
  for (std::size_t c = 0; c < *grid.columns; ++c) {
    if (c > 0 && !r.next()) r.fail_at_end("expected column " + std::to_string(c));
    if (at_end) r.fail_at_end("expected column 0");
    if (r.word(0) != "column") r.fail(0, "expected 'column'");
    r.expect_count(2 + *grid.height);
    if (r.count(1) != c) r.fail(1, "expected column index " + std::to_string(c));
    std::vector<std::optional<std::size_t>> col;
    for (std::size_t j = 0; j < *grid.height; ++j) {
      const auto w = r.word(2 + j);
      if (w == "unlabeled") {
        col.emplace_back(std::nullopt);
        continue;
      }
      auto idx = labels.classes.index_of(w);
      if (!idx) r.fail(2 + j, "unknown label '" + std::string(w) + "'");
      col.emplace_back(*idx);
    }
    labels.columns.push_back(std::move(col));
  }
  if (r.next()) r.fail(0, "unexpected content after the last column");
  return labels;
}

void write_labels(const PointLabels& labels, const std::filesystem::path& path) {
  write_file<PointLabels>(path, labels, &write_labels);
}

PointLabels read_labels(const std::filesystem::path& path) {
  return read_file<PointLabels>(path, &read_labels);
}

// ---------------------------------------------------------------------------
// Parameters

namespace {

struct ParamField {
  const char* key;
  double ModelParams::*member;
};

constexpr ParamField kParamFields[] = {
    {"w_geo", &ModelParams::w_geo},
    {"w_sem_lidar", &ModelParams::w_sem_lidar},
    {"w_sem_cam", &ModelParams::w_sem_cam},
    {"mc_cost", &ModelParams::mc_cost},
    {"sigma_range_m", &ModelParams::sigma_range_m},
    {"sigma_height_m", &ModelParams::sigma_height_m},
    {"outlier_rate", &ModelParams::outlier_rate},
    {"outlier_range_max_m", &ModelParams::outlier_range_max_m},
    {"grad_steep", &ModelParams::grad_steep},
    {"grad_shift", &ModelParams::grad_shift},
    {"sens_scale", &ModelParams::sens_scale},
    {"sens_shift", &ModelParams::sens_shift},
    {"sensor_height_m", &ModelParams::sensor_height_m},
};

}  // namespace

const std::vector<std::string>& param_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& f : kParamFields) k.emplace_back(f.key);
    return k;
  }();
  return keys;
}

double* param_field(ModelParams& params, std::string_view key) {
  for (const auto& f : kParamFields) {
    if (key == f.key) return &(params.*f.member);
  }
  return nullptr;
}

void write_params(const ModelParams& params, std::ostream& out) {
  write_magic(out, "stixel-params");
  for (const auto& f : kParamFields) out << f.key << ' ' << format_number(params.*f.member) << '\n';
}

ModelParams read_params(std::istream& in) {
  LineReader r(in);
  read_magic(r, "stixel-params");
  ModelParams p;
  while (r.next()) {
    r.expect_count(2);
    double* field = param_field(p, r.word(0));
    if (!field) r.fail(0, "unknown parameter '" + std::string(r.word(0)) + "'");
    *field = r.number(1);
  }
  p.validate();
  return p;
}

void write_params(const ModelParams& params, const std::filesystem::path& path) {
  write_file<ModelParams>(path, params, &write_params);
}

ModelParams read_params(const std::filesystem::path& path) {
  return read_file<ModelParams>(path, &read_params);
}

std::string params_hash(const ModelParams& params) {
  std::ostringstream s;
  write_params(params, s);
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : s.str()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// Scene

namespace {

double to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }
double to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

// Shortest degree text that reads back to exactly `rad`.
std::string format_angle(double rad) {
  const double deg = to_deg(rad);
  if (!std::isfinite(deg)) return format_number(deg);
  char buf[64];
  for (int decimals = 0; decimals <= 15; ++decimals) {
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, deg);
    if (to_rad(std::strtod(buf, nullptr)) == rad) return buf;
  }
  return format_number(deg);
}

struct SceneNumber {
  const char* key;
  double SceneSpec::*member;
  bool angle;
};

constexpr SceneNumber kSceneNumbers[] = {
    {"sensor_height_m", &SceneSpec::sensor_height_m, false},
    {"elevation_min_deg", &SceneSpec::elevation_min_rad, true},
    {"elevation_max_deg", &SceneSpec::elevation_max_rad, true},
    {"azimuth_min_deg", &SceneSpec::azimuth_min_rad, true},
    {"azimuth_max_deg", &SceneSpec::azimuth_max_rad, true},
    {"ground_extent_m", &SceneSpec::ground_extent_m, false},
    {"sigma_range_m", &SceneSpec::sigma_range_m, false},
    {"sigma_height_m", &SceneSpec::sigma_height_m, false},
    {"outlier_rate", &SceneSpec::outlier_rate, false},
    {"outlier_range_max_m", &SceneSpec::outlier_range_max_m, false},
    {"dropout_rate", &SceneSpec::dropout_rate, false},
    {"epsilon_lidar", &SceneSpec::epsilon_lidar, false},
    {"epsilon_camera", &SceneSpec::epsilon_camera, false},
    {"camera_fov_min_deg", &SceneSpec::camera_fov_min_rad, true},
    {"camera_fov_max_deg", &SceneSpec::camera_fov_max_rad, true},
};

}  // namespace

void write_scene(const SceneSpec& spec, std::ostream& out) {
  write_magic(out, "stixel-scene");
  out << "rows " << spec.rows << '\n';
  out << "columns " << spec.columns << '\n';
  out << "seed " << spec.seed << '\n';
  for (const auto& f : kSceneNumbers) {
    const double v = spec.*f.member;
    out << f.key << ' ' << (f.angle ? format_angle(v) : format_number(v)) << '\n';
  }
  out << "classes" << class_set_fields(spec.classes) << '\n';
  for (const auto& b : spec.ground_bands) {
    out << "ground_band " << format_number(b.until_m) << ' ' << b.label << '\n';
  }
  for (const auto& b : spec.boxes) {
    out << "box " << format_angle(b.azimuth_min_rad) << ' ' << format_angle(b.azimuth_max_rad)
        << ' ' << format_number(b.range_m) << ' '
        << format_number(b.height_m) << ' ' << b.label << '\n';
  }
}

SceneSpec read_scene(std::istream& in) {
  LineReader r(in);
  read_magic(r, "stixel-scene");
  SceneSpec spec;
  while (r.next()) {
    const auto key = r.word(0);
    if (key == "rows" || key == "columns" || key == "seed") {
      r.expect_count(2);
      const std::size_t v = r.count(1);
      if (key == "rows") spec.rows = v;
      else if (key == "columns") spec.columns = v;
      else spec.seed = v;
      continue;
    }
    if (key == "classes") {
      spec.classes = parse_class_set(r, 1);
      continue;
    }
    if (key == "ground_band") {
      r.expect_count(3);
      spec.ground_bands.push_back({r.number(1), std::string(r.word(2))});
      continue;
    }
    if (key == "box") {
      r.expect_count(6);
      spec.boxes.push_back({to_rad(r.number(1)), to_rad(r.number(2)), r.number(3), r.number(4),
                            std::string(r.word(5))});
      continue;
    }
    bool known = false;
    for (const auto& f : kSceneNumbers) {
      if (key == f.key) {
        r.expect_count(2);
        const double v = r.number(1);
        spec.*f.member = f.angle ? to_rad(v) : v;
        known = true;
        break;
      }
    }
    if (!known) r.fail(0, "unknown scene field '" + std::string(key) + "'");
  }
  spec.validate();
  return spec;
}

void write_scene(const SceneSpec& spec, const std::filesystem::path& path) {
  write_file<SceneSpec>(path, spec, &write_scene);
}

SceneSpec read_scene(const std::filesystem::path& path) {
  return read_file<SceneSpec>(path, &read_scene);
}

// ---------------------------------------------------------------------------
// Reports

void write_report(const EvalReport& report, const std::string& hash, std::ostream& out) {
  write_magic(out, "stixel-report");
  out << "params_hash " << hash << '\n';
  out << "outlier_rate " << format_number(report.outlier_rate) << '\n';
  out << "mean_iou " << format_number(report.mean_iou) << '\n';
  out << "compression_rate " << format_number(report.compression_rate) << '\n';
  out << "points " << report.points << '\n';
  out << "valid_points " << report.valid_points << '\n';
  out << "stixels " << report.stixels << '\n';
  for (const auto& [label, v] : report.iou_per_class) {
    out << "iou " << label << ' ' << format_number(v) << '\n';
  }
}

void write_sweep(const std::string& parameter, const std::vector<SweepRow>& rows,
                 const std::string& hash, std::ostream& out) {
  write_magic(out, "stixel-sweep");
  out << "params_hash " << hash << '\n';
  out << "parameter " << parameter << '\n';
  out << "fields value outlier_rate mean_iou compression_rate stixels\n";
  for (const auto& row : rows) {
    out << "row " << format_number(row.value) << ' ' << format_number(row.report.outlier_rate)
        << ' ' << format_number(row.report.mean_iou) << ' '
        << format_number(row.report.compression_rate) << ' ' << row.report.stixels << '\n';
  }
}

}  // namespace stixels
