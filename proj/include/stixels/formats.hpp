#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stixels/metrics.hpp"
#include "stixels/model.hpp"
#include "stixels/synthetic.hpp"

namespace stixels {

/// Malformed input document. line and column are 1-based.
class FormatError : public std::runtime_error {
 public:
  FormatError(std::size_t line, std::size_t column, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ", column " +
                           std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// A file could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// All documents are line-oriented text: a "<kind> <version>" first line,
// whitespace-separated fields, '#' comments. Floats are written in shortest
// round-trip form, so write/read cycles are exact.

void write_scan(const Scan& scan, std::ostream& out);
Scan read_scan(std::istream& in);
void write_scan(const Scan& scan, const std::filesystem::path& path);
Scan read_scan(const std::filesystem::path& path);

/// Rejects worlds that break the stixel or column invariants.
void write_world(const StixelWorld& world, std::ostream& out);
StixelWorld read_world(std::istream& in);
void write_world(const StixelWorld& world, const std::filesystem::path& path);
StixelWorld read_world(const std::filesystem::path& path);

void write_labels(const PointLabels& labels, std::ostream& out);
PointLabels read_labels(std::istream& in);
void write_labels(const PointLabels& labels, const std::filesystem::path& path);
PointLabels read_labels(const std::filesystem::path& path);

/// Keys absent from the document keep their default values; unknown keys
/// are rejected. The result is validated.
void write_params(const ModelParams& params, std::ostream& out);
ModelParams read_params(std::istream& in);
void write_params(const ModelParams& params, const std::filesystem::path& path);
ModelParams read_params(const std::filesystem::path& path);

/// Parameter document keys in canonical order.
const std::vector<std::string>& param_keys();
/// The ModelParams field behind a parameter key, or nullptr.
double* param_field(ModelParams& params, std::string_view key);

/// FNV-1a of the canonical parameter document, as 16 hex digits.
std::string params_hash(const ModelParams& params);

/// Scene angles are stored in degrees.
void write_scene(const SceneSpec& spec, std::ostream& out);
SceneSpec read_scene(std::istream& in);
void write_scene(const SceneSpec& spec, const std::filesystem::path& path);
SceneSpec read_scene(const std::filesystem::path& path);

void write_report(const EvalReport& report, const std::string& params_hash,
                  std::ostream& out);

struct SweepRow {
  double value = 0.0;
  EvalReport report;
};

void write_sweep(const std::string& parameter, const std::vector<SweepRow>& rows,
                 const std::string& params_hash, std::ostream& out);

using Rgb = std::array<std::uint8_t, 3>;

/// Colour per stixel label index.
struct Palette {
  std::vector<Rgb> colors;
};

/// Cityscapes-style colours by label name; unknown names render grey.
Palette default_palette(const ClassSet& classes);

struct RenderOptions {
  std::size_t scale_x = 1;
  std::size_t scale_y = 1;
};

/// Binary PPM (P6): one pixel column per scan column, top image row = top
/// scan row, each pixel coloured by its covering stixel's label. Throws
/// std::invalid_argument on shape mismatch or an oversized image.
std::string render_ppm(const StixelWorld& world, const Scan& scan,
                       const Palette& palette, const RenderOptions& options = {});
void render_ppm(const StixelWorld& world, const Scan& scan, const Palette& palette,
                const std::filesystem::path& path, const RenderOptions& options = {});

}  // namespace stixels
