#pragma once

#include <cstddef>
#include <limits>
#include <optional>

#include <Eigen/Core>

#include "stixels/model.hpp"

namespace stixels {

/// Energy of a forbidden assignment (valid return under a sky stixel).
inline constexpr double kInfiniteEnergy = std::numeric_limits<double>::infinity();

/// Floor applied to mapped class probabilities before taking -log.
inline constexpr double kProbabilityFloor = 1e-6;

/// Lower clamp of 1 - P_S - P_G in the object branch of the sensor term,
/// i.e. P_S + P_G is capped at 1 - 1e-9.
inline constexpr double kObjectProbabilityFloor = 1e-9;

/// The (class, label, distance) slice of a stixel that the data terms see.
struct StixelHypothesis {
  StructuralClass sclass = StructuralClass::Object;
  std::size_t label = 0;
  double distance_m = 0.0;
};

enum class SemanticDomain : std::uint8_t { Lidar, Camera };

/// log(1 + e^x) without overflow.
double softplus(double x);

/// P_ob = (1 + tanh(steep * (phi - shift))) / 2.
double object_probability(double phi, const ModelParams& p);

/// P_S = (1 + tanh(scale * (alpha_v - shift))) / 2.
double sky_probability(double alpha_v, const ModelParams& p);

/// P_G(alpha_v) = P_S(-alpha_v).
double ground_probability(double alpha_v, const ModelParams& p);

/// Ground-model term for a precomputed inclination: -log(1 - P_ob) for
/// ground, -log(P_ob) for object, 0 for sky or an undefined inclination.
double gradient_energy(StructuralClass c, std::optional<double> phi,
                       const ModelParams& p);

/// Same, with the inclination taken between `d` and the row below it.
/// `below` is null for the bottom row of a column.
double ground_gradient_energy(const StixelHypothesis& hyp, const PolarDepth& d,
                              const PolarDepth* below, const ModelParams& p);

/// Sensor term. Invalid returns are scored by their elevation; a valid return
/// under a sky hypothesis is forbidden (kInfiniteEnergy).
double sensor_energy(StructuralClass c, const PolarDepth& d, const ModelParams& p);

/// Gaussian plus uniform-outlier mixture over a residual, shifted so that a
/// zero residual costs exactly 0.
class ResidualMixture {
 public:
  ResidualMixture(double sigma, const ModelParams& p);

  double energy(double residual) const;
  /// Posterior weight of the Gaussian component for this residual.
  double inlier_weight(double residual) const;

 private:
  double log_inlier(double residual) const;

  double inv_two_sigma_sq_;
  double log_inlier_peak_;
  double log_outlier_;
  double zero_shift_;
};

/// Height of a valid return above the ideal ground plane.
double height_above_ground(const PolarDepth& d, const ModelParams& p);

/// Depth term: range residual against hyp.distance_m for objects, height
/// above the ground plane for ground, 0 for sky or an invalid return.
double distance_energy(const StixelHypothesis& hyp, const PolarDepth& d,
                       const ModelParams& p);

/// -log of the label's probability after mapping `sem` through `class_map`,
/// floored at kProbabilityFloor; 0 when `sem` is absent.
double semantic_energy(const Eigen::MatrixXd& class_map, std::size_t label,
                       const SemanticDistribution& sem);

double semantic_energy(SemanticDomain domain, const StixelHypothesis& hyp,
                       const SemanticDistribution& sem, const ScanClasses& classes);

/// Weighted sum of all data terms for one measurement. The hard sky
/// constraint yields kInfiniteEnergy for any weights.
double measurement_energy(const StixelHypothesis& hyp, const Measurement& m,
                          const Measurement* below, const ScanClasses& classes,
                          const ModelParams& p);

}  // namespace stixels
