#pragma once

#include <optional>

#include <Eigen/Core>

#include "stixels/model.hpp"

namespace stixels {

/// Sensor frame point: x forward, y left, z up, origin at the sensor.
using CartesianPoint = Eigen::Vector3d;

/// Throws std::invalid_argument for an invalid return.
CartesianPoint polar_to_cartesian(const PolarDepth& d);

PolarDepth cartesian_to_polar(const CartesianPoint& p);

/// Horizontal distance from the sensor axis, sqrt(x^2 + y^2).
inline double ground_distance(const CartesianPoint& p) { return p.head<2>().norm(); }

/// Inclination of the line joining two returns, atan2(dz, d_ground), with the
/// deltas taken from the lower-elevation return to the higher one (argument
/// order on equal elevation). Flat ground gives 0, a vertical face +pi/2 and
/// an overhang a value above pi/2. nullopt when either return is invalid or
/// both deltas vanish.
std::optional<double> gradient(const PolarDepth& a, const PolarDepth& b);

/// atan2 inclination of explicit deltas; nullopt for (0, 0).
std::optional<double> inclination(double dz, double d_ground);

}  // namespace stixels
