#include "stixels/projection.hpp"

#include <cmath>
#include <stdexcept>

namespace stixels {

CartesianPoint polar_to_cartesian(const PolarDepth& d) {
  if (!d.valid()) {
    throw std::invalid_argument("invalid measurement has no Cartesian position");
  }
  const double r = *d.range_m;
  const double horizontal = r * std::cos(d.elevation_rad);
  return {horizontal * std::cos(d.azimuth_rad), horizontal * std::sin(d.azimuth_rad),
          r * std::sin(d.elevation_rad)};
}

PolarDepth cartesian_to_polar(const CartesianPoint& p) {
  const double r = p.norm();
  return PolarDepth::measured(r, std::atan2(p.y(), p.x()),
                              std::atan2(p.z(), ground_distance(p)));
}

std::optional<double> inclination(double dz, double d_ground) {
  if (dz == 0.0 && d_ground == 0.0) return std::nullopt;
  return std::atan2(dz, d_ground);
}

std::optional<double> gradient(const PolarDepth& a, const PolarDepth& b) {
  if (!a.valid() || !b.valid()) return std::nullopt;
  const bool swap = b.elevation_rad < a.elevation_rad;
  const CartesianPoint lower = polar_to_cartesian(swap ? b : a);
  const CartesianPoint upper = polar_to_cartesian(swap ? a : b);
  return inclination(upper.z() - lower.z(),
                     ground_distance(upper) - ground_distance(lower));
}

}  // namespace stixels
