#include "stixels/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "stixels/projection.hpp"

namespace stixels {

namespace {

double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

double log_cosh(double x) {
  const double ax = std::abs(x);
  return ax + std::log1p(std::exp(-2.0 * ax)) - std::numbers::ln2;
}

// log(1 - P_S - P_G) via 1 - P_S - P_G = sinh(-(x + y)) / (2 cosh x cosh y),
// x and y being the two tanh arguments. -inf when P_S + P_G >= 1.
double log_object_rest(double alpha_v, const ModelParams& p) {
  const double k = 2.0 * p.sens_scale * p.sens_shift;
  if (!(k > 0.0)) return -std::numeric_limits<double>::infinity();
  const double x = p.sens_scale * (alpha_v - p.sens_shift);
  const double y = p.sens_scale * (-alpha_v - p.sens_shift);
  const double log_sinh = k - std::numbers::ln2 + std::log(-std::expm1(-2.0 * k));
  return log_sinh - std::numbers::ln2 - log_cosh(x) - log_cosh(y);
}

}  // namespace

double softplus(double x) {
  return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double object_probability(double phi, const ModelParams& p) {
  return 0.5 * (1.0 + std::tanh(p.grad_steep * (phi - p.grad_shift)));
}

double sky_probability(double alpha_v, const ModelParams& p) {
  return 0.5 * (1.0 + std::tanh(p.sens_scale * (alpha_v - p.sens_shift)));
}

double ground_probability(double alpha_v, const ModelParams& p) {
  return sky_probability(-alpha_v, p);
}

// (1 + tanh x) / 2 is the logistic function of 2x, so both log-probabilities
// reduce to softplus.
double gradient_energy(StructuralClass c, std::optional<double> phi,
                       const ModelParams& p) {
  if (!phi || c == StructuralClass::Sky) return 0.0;
  const double x = 2.0 * p.grad_steep * (*phi - p.grad_shift);
  return c == StructuralClass::Ground ? softplus(x) : softplus(-x);
}

double ground_gradient_energy(const StixelHypothesis& hyp, const PolarDepth& d,
                              const PolarDepth* below, const ModelParams& p) {
  if (below == nullptr) return 0.0;
  return gradient_energy(hyp.sclass, gradient(d, *below), p);
}

double sensor_energy(StructuralClass c, const PolarDepth& d, const ModelParams& p) {
  if (d.valid()) return c == StructuralClass::Sky ? kInfiniteEnergy : 0.0;
  const double a = d.elevation_rad;
  switch (c) {
    case StructuralClass::Sky:
      return softplus(-2.0 * p.sens_scale * (a - p.sens_shift));
    case StructuralClass::Ground:
      return softplus(2.0 * p.sens_scale * (a + p.sens_shift));
    case StructuralClass::Object: {
      return -std::max(log_object_rest(a, p), std::log(kObjectProbabilityFloor));
    }
  }
  return 0.0;
}

ResidualMixture::ResidualMixture(double sigma, const ModelParams& p)
    : inv_two_sigma_sq_(0.5 / (sigma * sigma)),
      log_inlier_peak_(std::log1p(-p.outlier_rate) -
                       std::log(sigma * std::sqrt(2.0 * std::numbers::pi))),
      log_outlier_(p.outlier_rate > 0
                       ? std::log(p.outlier_rate / p.outlier_range_max_m)
                       : -std::numeric_limits<double>::infinity()),
      zero_shift_(log_add_exp(log_inlier(0.0), log_outlier_)) {}

double ResidualMixture::log_inlier(double residual) const {
  return log_inlier_peak_ - residual * residual * inv_two_sigma_sq_;
}

double ResidualMixture::energy(double residual) const {
  return zero_shift_ - log_add_exp(log_inlier(residual), log_outlier_);
}

double ResidualMixture::inlier_weight(double residual) const {
  const double li = log_inlier(residual);
  return std::exp(li - log_add_exp(li, log_outlier_));
}

double height_above_ground(const PolarDepth& d, const ModelParams& p) {
  return *d.range_m * std::sin(d.elevation_rad) + p.sensor_height_m;
}

double distance_energy(const StixelHypothesis& hyp, const PolarDepth& d,
                       const ModelParams& p) {
  if (!d.valid()) return 0.0;
  switch (hyp.sclass) {
    case StructuralClass::Object:
      return ResidualMixture(p.sigma_range_m, p).energy(*d.range_m - hyp.distance_m);
    case StructuralClass::Ground:
      return ResidualMixture(p.sigma_height_m, p).energy(height_above_ground(d, p));
    case StructuralClass::Sky:
      return 0.0;
  }
  return 0.0;
}

double semantic_energy(const Eigen::MatrixXd& class_map, std::size_t label,
                       const SemanticDistribution& sem) {
  if (!sem) return 0.0;
  const double q = class_map.col(static_cast<Eigen::Index>(label)).dot(*sem);
  return -std::log(std::max(q, kProbabilityFloor));
}

double semantic_energy(SemanticDomain domain, const StixelHypothesis& hyp,
                       const SemanticDistribution& sem, const ScanClasses& classes) {
  const auto& map =
      domain == SemanticDomain::Lidar ? classes.lidar_map : classes.camera_map;
  return semantic_energy(map, hyp.label, sem);
}

double measurement_energy(const StixelHypothesis& hyp, const Measurement& m,
                          const Measurement* below, const ScanClasses& classes,
                          const ModelParams& p) {
  const double sensor = sensor_energy(hyp.sclass, m.depth, p);
  if (sensor == kInfiniteEnergy) return kInfiniteEnergy;
  const double geometry =
      distance_energy(hyp, m.depth, p) +
      ground_gradient_energy(hyp, m.depth, below ? &below->depth : nullptr, p) +
      sensor;
  return p.w_geo * geometry +
         p.w_sem_lidar * semantic_energy(SemanticDomain::Lidar, hyp, m.lidar_sem, classes) +
         p.w_sem_cam * semantic_energy(SemanticDomain::Camera, hyp, m.cam_sem, classes);
}

}  // namespace stixels
