#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "stixels/projection.hpp"

namespace stixels {
namespace {

constexpr double kPi = std::numbers::pi;

PolarDepth at(double x, double y, double z) { return cartesian_to_polar({x, y, z}); }

TEST(PolarToCartesian, AxisExamples) {
  const auto a = polar_to_cartesian(PolarDepth::measured(5.0, 0.0, 0.0));
  EXPECT_NEAR((a - CartesianPoint(5, 0, 0)).norm(), 0.0, 1e-15);
  const auto b = polar_to_cartesian(PolarDepth::measured(2.0, 0.0, kPi / 2));
  EXPECT_NEAR((b - CartesianPoint(0, 0, 2)).norm(), 0.0, 1e-15);
  const auto c = polar_to_cartesian(PolarDepth::measured(std::sqrt(2.0), 0.0, kPi / 4));
  EXPECT_NEAR((c - CartesianPoint(1, 0, 1)).norm(), 0.0, 1e-15);
}

TEST(PolarToCartesian, InvalidReturnThrows) {
  try {
    polar_to_cartesian(PolarDepth::invalid(0.0, 0.1));
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_STREQ(e.what(), "invalid measurement has no Cartesian position");
  }
}

TEST(PolarToCartesian, NormAndRoundTrip) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const auto d = PolarDepth::measured(0.1 + 100.0 * u(rng), kPi * (2.0 * u(rng) - 1.0),
                                        (kPi / 2 - 1e-3) * (2.0 * u(rng) - 1.0));
    const auto p = polar_to_cartesian(d);
    EXPECT_NEAR(p.norm(), *d.range_m, 1e-9 * *d.range_m);
    const auto back = cartesian_to_polar(p);
    EXPECT_NEAR(*back.range_m, *d.range_m, 1e-9 * *d.range_m);
    EXPECT_NEAR(back.elevation_rad, d.elevation_rad, 1e-9);
    EXPECT_NEAR(std::remainder(back.azimuth_rad - d.azimuth_rad, 2 * kPi), 0.0, 1e-9);
  }
}

TEST(Gradient, Examples) {
  EXPECT_NEAR(*gradient(at(3, 0, 0), at(4, 0, 1)), kPi / 4, 1e-12);
  EXPECT_NEAR(*gradient(at(3, 0, 0), at(4, 0, 0)), 0.0, 1e-12);
  EXPECT_FALSE(gradient(at(3, 0, 0), PolarDepth::invalid(0.0, 0.1)));
  EXPECT_FALSE(gradient(PolarDepth::invalid(0.0, 0.1), at(3, 0, 0)));
}

TEST(Gradient, VerticalFaceAndOverhang) {
  EXPECT_NEAR(*gradient(at(5, 0, -1), at(5, 0, 1)), kPi / 2, 1e-12);
  EXPECT_GT(*gradient(at(5, 0, -1), at(4, 0, 1)), kPi / 2);
}

TEST(Gradient, ArgumentOrderDoesNotMatter) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const auto a = PolarDepth::measured(2.0 + 20.0 * std::abs(u(rng)), 0.3, 0.4 * u(rng));
    const auto b = PolarDepth::measured(2.0 + 20.0 * std::abs(u(rng)), 0.3, 0.4 * u(rng));
    if (a.elevation_rad == b.elevation_rad) continue;
    EXPECT_EQ(*gradient(a, b), *gradient(b, a));
    // Deltas negated jointly give the same inclination.
    const auto pa = polar_to_cartesian(a), pb = polar_to_cartesian(b);
    const bool a_low = a.elevation_rad < b.elevation_rad;
    const double dz = (a_low ? 1.0 : -1.0) * (pb.z() - pa.z());
    const double dg = (a_low ? 1.0 : -1.0) * (ground_distance(pb) - ground_distance(pa));
    EXPECT_NEAR(*gradient(a, b), *inclination(dz, dg), 1e-12);
  }
}

TEST(Inclination, UndefinedOnlyForZeroDeltas) {
  EXPECT_FALSE(inclination(0.0, 0.0));
  EXPECT_NEAR(*inclination(1.0, 0.0), kPi / 2, 0.0);
  EXPECT_NEAR(*inclination(-1.0, 0.0), -kPi / 2, 0.0);
}

}  // namespace
}  // namespace stixels
