#include <fstream>
#include <map>
#include <stdexcept>
#include <string>

#include "stixels/formats.hpp"
#include "stixels/prior.hpp"

namespace stixels {

namespace {

constexpr Rgb kUnknownColor{128, 128, 128};
constexpr std::size_t kMaxImageBytes = std::size_t{1} << 30;

const std::map<std::string, Rgb, std::less<>>& label_colors() {
  static const std::map<std::string, Rgb, std::less<>> colors{
      {"road", {128, 64, 128}},       {"sidewalk", {244, 35, 232}},
      {"person", {220, 20, 60}},      {"rider", {255, 0, 0}},
      {"small_vehicle", {0, 0, 142}}, {"large_vehicle", {0, 0, 70}},
      {"two_wheeler", {119, 11, 32}}, {"construction", {70, 70, 70}},
      {"pole", {153, 153, 153}},      {"traffic_sign", {220, 220, 0}},
      {"vegetation", {107, 142, 35}}, {"terrain", {152, 251, 152}},
      {"sky", {70, 130, 180}},
  };
  return colors;
}

}  // namespace

Palette default_palette(const ClassSet& classes) {
  Palette p;
  p.colors.reserve(classes.size());
  for (const auto& name : classes.names()) {
    auto it = label_colors().find(name);
    p.colors.push_back(it == label_colors().end() ? kUnknownColor : it->second);
  }
  return p;
}

std::string render_ppm(const StixelWorld& world, const Scan& scan, const Palette& palette,
                       const RenderOptions& options) {
  if (world.columns.size() != scan.columns.size() || world.height != scan.height()) {
    throw std::invalid_argument("render: world and scan shapes differ");
  }
  if (palette.colors.size() < world.classes.size()) {
    throw std::invalid_argument("render: palette does not cover every label");
  }
  if (options.scale_x == 0 || options.scale_y == 0) {
    throw std::invalid_argument("render: scale must be >= 1");
  }
  for (std::size_t c = 0; c < world.columns.size(); ++c) {
    if (auto v = consistency_check(world.columns[c], world.height)) {
      throw std::invalid_argument("render: column " + std::to_string(c) + ": " + *v);
    }
  }
  const std::size_t cols = world.columns.size();
  const std::size_t h = world.height;
  // Guard each product against overflow before forming the byte count.
  auto fits = [](std::size_t a, std::size_t b) { return b == 0 || a <= kMaxImageBytes / b; };
  if (!fits(cols, options.scale_x) || !fits(h, options.scale_y)) {
    throw std::invalid_argument("render: image too large");
  }
  const std::size_t width = cols * options.scale_x;
  const std::size_t height = h * options.scale_y;
  if (!fits(width, height) || !fits(width * height, 3) || width * height * 3 > kMaxImageBytes) {
    throw std::invalid_argument("render: image too large");
  }

  std::string header =
      "P6\n" + std::to_string(width) + ' ' + std::to_string(height) + "\n255\n";
  std::string out = header;
  out.resize(header.size() + width * height * 3);
  char* pixels = out.data() + header.size();
  for (std::size_t y = 0; y < height; ++y) {
    const std::size_t row = h - 1 - y / options.scale_y;
    for (std::size_t x = 0; x < width; ++x) {
      const Rgb& rgb = palette.colors[world.stixel_at(x / options.scale_x, row).label];
      char* px = pixels + (y * width + x) * 3;
      px[0] = static_cast<char>(rgb[0]);
      px[1] = static_cast<char>(rgb[1]);
      px[2] = static_cast<char>(rgb[2]);
    }
  }
  return out;
}

void render_ppm(const StixelWorld& world, const Scan& scan, const Palette& palette,
                const std::filesystem::path& path, const RenderOptions& options) {
  const std::string image = render_ppm(world, scan, palette, options);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "'");
  out.write(image.data(), static_cast<std::streamsize>(image.size()));
  out.flush();
  if (!out) throw IoError("cannot write '" + path.string() + "'");
}

}  // namespace stixels
