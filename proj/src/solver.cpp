#include "stixels/solver.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <stdexcept>
#include <string>
#include <thread>

#include "stixels/prior.hpp"
#include "stixels/projection.hpp"

namespace stixels {

namespace {

constexpr std::size_t class_index(StructuralClass c) {
  return static_cast<std::size_t>(c);
}

}  // namespace

SegmentCostTable::SegmentCostTable(const ScanColumn& column,
                                   const ScanClasses& classes,
                                   const ModelParams& params)
    : height_(column.height()), labels_(&classes.stixel) {
  const std::size_t h = height_;
  const auto& cells = column.cells;
  const double w_geo = params.w_geo;
  const ResidualMixture object_fit(params.sigma_range_m, params);
  const ResidualMixture ground_fit(params.sigma_height_m, params);

  // Per-row terms that do not depend on the segmentation.
  std::vector<char> valid(h);
  std::vector<double> range(h, 0.0);
  std::vector<double> horizontal(h, 0.0);
  Eigen::VectorXd ground_prefix = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(h + 1));
  Eigen::VectorXd object_prefix = ground_prefix;
  Eigen::VectorXd sky_prefix = ground_prefix;
  std::vector<std::size_t> valid_prefix(h + 1, 0);
  top_valid_row_.assign(h, -1);

  for (std::size_t j = 0; j < h; ++j) {
    const PolarDepth& d = cells[j].depth;
    valid[j] = d.valid();
    const auto phi = j > 0 ? gradient(d, cells[j - 1].depth) : std::nullopt;
    double ground = gradient_energy(StructuralClass::Ground, phi, params) +
                    sensor_energy(StructuralClass::Ground, d, params);
    const double object = gradient_energy(StructuralClass::Object, phi, params) +
                          sensor_energy(StructuralClass::Object, d, params);
    double sky = 0.0;
    if (d.valid()) {
      range[j] = *d.range_m;
      horizontal[j] = ground_distance(polar_to_cartesian(d));
      ground += ground_fit.energy(height_above_ground(d, params));
    } else {
      sky = sensor_energy(StructuralClass::Sky, d, params);
    }
    const auto row = static_cast<Eigen::Index>(j);
    ground_prefix[row + 1] = ground_prefix[row] + w_geo * ground;
    object_prefix[row + 1] = object_prefix[row] + w_geo * object;
    sky_prefix[row + 1] = sky_prefix[row] + w_geo * sky;
    valid_prefix[j + 1] = valid_prefix[j] + (valid[j] ? 1 : 0);
    top_valid_row_[j] = valid[j] ? static_cast<int>(j) : (j > 0 ? top_valid_row_[j - 1] : -1);
  }

  const std::size_t n_labels = classes.stixel.size();
  semantic_prefix_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(h + 1),
                                           static_cast<Eigen::Index>(n_labels));
  for (std::size_t j = 0; j < h; ++j) {
    const auto row = static_cast<Eigen::Index>(j);
    for (std::size_t l = 0; l < n_labels; ++l) {
      const auto col = static_cast<Eigen::Index>(l);
      const double e =
          params.w_sem_lidar * semantic_energy(classes.lidar_map, l, cells[j].lidar_sem) +
          params.w_sem_cam * semantic_energy(classes.camera_map, l, cells[j].cam_sem);
      semantic_prefix_(row + 1, col) = semantic_prefix_(row, col) + e;
    }
  }

  // Object residual energies and inlier weights of every (candidate, row) pair.
  Eigen::MatrixXd pair_energy = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(h),
                                                      static_cast<Eigen::Index>(h));
  Eigen::MatrixXd pair_weight = pair_energy;
  for (std::size_t k = 0; k < h; ++k) {
    if (!valid[k]) continue;
    for (std::size_t j = 0; j < h; ++j) {
      if (!valid[j]) continue;
      const double residual = range[j] - range[k];
      pair_energy(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) =
          object_fit.energy(residual);
      pair_weight(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) =
          object_fit.inlier_weight(residual);
    }
  }

  for (auto& g : geometry_) g.assign(h * h, kInfiniteEnergy);
  object_distance_.assign(h * h, 0.0);
  ground_distance_.assign(h * h, 0.0);

  // Candidate sums accumulate rows bottom-up so each equals a plain
  // row-ordered summation over the segment.
  std::vector<double> acc_energy(h), acc_weight(h), acc_weighted_range(h);
  std::vector<std::size_t> candidates;
  candidates.reserve(h);
  for (std::size_t b = 0; b < h; ++b) {
    candidates.clear();
    for (std::size_t t = b; t < h; ++t) {
      const auto ti = static_cast<Eigen::Index>(t);
      if (valid[t]) {
        for (std::size_t k : candidates) {
          const auto ki = static_cast<Eigen::Index>(k);
          acc_energy[k] += pair_energy(ki, ti);
          acc_weight[k] += pair_weight(ki, ti);
          acc_weighted_range[k] += pair_weight(ki, ti) * range[t];
        }
        acc_energy[t] = acc_weight[t] = acc_weighted_range[t] = 0.0;
        for (std::size_t j = b; j <= t; ++j) {
          if (!valid[j]) continue;
          const auto ji = static_cast<Eigen::Index>(j);
          acc_energy[t] += pair_energy(ti, ji);
          acc_weight[t] += pair_weight(ti, ji);
          acc_weighted_range[t] += pair_weight(ti, ji) * range[j];
        }
        candidates.push_back(t);
      }

      const std::size_t idx = index(b, t);
      const auto bi = static_cast<Eigen::Index>(b);

      // Ground.
      geometry_[class_index(StructuralClass::Ground)][idx] =
          ground_prefix[ti + 1] - ground_prefix[bi];
      const int top_valid = top_valid_row_[t];
      ground_distance_[idx] =
          top_valid >= static_cast<int>(b) ? horizontal[static_cast<std::size_t>(top_valid)] : 0.0;

      // Sky is forbidden over any valid return.
      if (valid_prefix[t + 1] == valid_prefix[b]) {
        geometry_[class_index(StructuralClass::Sky)][idx] =
            sky_prefix[ti + 1] - sky_prefix[bi];
      }

      // Object: best measured range, then one reweighted-mean step.
      double fit = 0.0;
      double distance = 0.0;
      if (!candidates.empty()) {
        std::size_t best = candidates.front();
        for (std::size_t k : candidates) {
          if (acc_energy[k] < acc_energy[best]) best = k;
        }
        stats_.candidate_evaluations += candidates.size();
        fit = acc_energy[best];
        distance = range[best];
        if (candidates.size() >= 2 && acc_weight[best] > 0.0) {
          const double refined = acc_weighted_range[best] / acc_weight[best];
          double refined_fit = 0.0;
          for (std::size_t j : candidates) refined_fit += object_fit.energy(range[j] - refined);
          ++stats_.refinements;
          if (refined_fit < fit) {
            fit = refined_fit;
            distance = refined;
          }
        }
      }
      geometry_[class_index(StructuralClass::Object)][idx] =
          object_prefix[ti + 1] - object_prefix[bi] + w_geo * fit;
      object_distance_[idx] = distance;
    }
  }
}

SegmentCost SegmentCostTable::geometry(std::size_t bottom, std::size_t top,
                                       StructuralClass c) const {
  const std::size_t idx = index(bottom, top);
  SegmentCost out;
  out.energy = geometry_[class_index(c)][idx];
  switch (c) {
    case StructuralClass::Sky:
      out.distance = StixelDistance::infinite();
      break;
    case StructuralClass::Ground:
      out.distance = top_valid_row_[top] >= static_cast<int>(bottom)
                         ? StixelDistance::finite(ground_distance_[idx])
                         : StixelDistance::none();
      break;
    case StructuralClass::Object:
      out.distance = top_valid_row_[top] >= static_cast<int>(bottom)
                         ? StixelDistance::finite(object_distance_[idx])
                         : StixelDistance::none();
      break;
  }
  return out;
}

double SegmentCostTable::semantic(std::size_t bottom, std::size_t top,
                                  std::size_t label) const {
  const auto l = static_cast<Eigen::Index>(label);
  return semantic_prefix_(static_cast<Eigen::Index>(top + 1), l) -
         semantic_prefix_(static_cast<Eigen::Index>(bottom), l);
}

SegmentCost SegmentCostTable::cost(std::size_t bottom, std::size_t top,
                                   std::size_t label) const {
  SegmentCost out = geometry(bottom, top, labels_->structural_of(label));
  if (out.energy != kInfiniteEnergy) out.energy += semantic(bottom, top, label);
  return out;
}

SegmentCost segment_cost(const ScanColumn& column, const ScanClasses& classes,
                         std::size_t bottom, std::size_t top, StructuralClass sclass,
                         std::size_t label, const ModelParams& params) {
  if (bottom > top || top >= column.height()) {
    throw std::invalid_argument("segment_cost: rows out of range");
  }
  if (label >= classes.stixel.size() || classes.stixel.structural_of(label) != sclass) {
    throw std::invalid_argument("segment_cost: label does not belong to the structural class");
  }
  return SegmentCostTable(column, classes, params).cost(bottom, top, label);
}

namespace {

struct Choice {
  double energy = kInfiniteEnergy;
  std::size_t count = 0;
  std::size_t top = 0;
  std::size_t label = 0;
};

// Lexicographic (energy, stixel count, first cut, label).
bool better(const Choice& a, const Choice& b) {
  if (a.energy != b.energy) return a.energy < b.energy;
  if (a.count != b.count) return a.count < b.count;
  if (a.top != b.top) return a.top < b.top;
  return a.label < b.label;
}

}  // namespace

ColumnSolution solve_column(const ScanColumn& column, const ScanClasses& classes,
                            const ModelParams& params) {
  const std::size_t h = column.height();
  if (h == 0) throw std::invalid_argument("solve_column: column has no cells");

  const SegmentCostTable table(column, classes, params);
  const std::size_t n_labels = classes.stixel.size();
  ColumnSolution out;
  out.stats = table.stats();

  // best[b]: optimal segmentation of rows b..h-1, first stixel included.
  std::vector<Choice> best(h + 1);
  best[h].energy = 0.0;
  for (std::size_t b = h; b-- > 0;) {
    Choice& current = best[b];
    for (std::size_t t = b; t < h; ++t) {
      const Choice& rest = best[t + 1];
      if (rest.energy == kInfiniteEnergy) continue;
      for (std::size_t l = 0; l < n_labels; ++l) {
        ++out.stats.segment_evaluations;
        const double geo =
            table.geometry(b, t, classes.stixel.structural_of(l)).energy;
        if (geo == kInfiniteEnergy) continue;
        Choice candidate{geo + table.semantic(b, t, l) + params.mc_cost + rest.energy,
                         rest.count + 1, t, l};
        if (better(candidate, current)) current = candidate;
      }
    }
  }
  if (best[0].energy == kInfiniteEnergy) {
    throw std::runtime_error("solve_column: no finite-energy segmentation");
  }

  for (std::size_t b = 0; b < h;) {
    const Choice& c = best[b];
    const StructuralClass sclass = classes.stixel.structural_of(c.label);
    out.column.stixels.push_back(
        {b, c.top, table.geometry(b, c.top, sclass).distance, c.label, sclass});
    b = c.top + 1;
  }
  out.energy = best[0].energy - params.mc_cost;
  return out;
}

StixelWorld solve_scan(const Scan& scan, const ModelParams& params,
                       const SolveOptions& options, SolveStats* stats) {
  const std::size_t n = scan.columns.size();
  std::vector<ColumnSolution> solutions(n);
  std::vector<std::exception_ptr> errors(n);

  auto solve_one = [&](std::size_t i) {
    try {
      solutions[i] = solve_column(scan.columns[i], scan.classes, params);
      solutions[i].column.column = i;
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };

  const unsigned workers = std::min<std::size_t>(std::max(options.threads, 1u), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) solve_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) solve_one(i);
      });
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw std::runtime_error("column " + std::to_string(i) + ": " + e.what());
    }
  }

  StixelWorld world;
  world.height = scan.height();
  world.classes = scan.classes.stixel;
  world.columns.reserve(n);
  world.energies.reserve(n);
  SolveStats total;
  for (auto& s : solutions) {
    world.columns.push_back(std::move(s.column));
    world.energies.push_back(s.energy);
    total += s.stats;
  }
  if (stats) *stats = total;
  return world;
}

double column_energy(const StixelColumn& stixels, const ScanColumn& column,
                     const ScanClasses& classes, const ModelParams& params) {
  if (auto violation = consistency_check(stixels, column.height())) {
    throw std::invalid_argument("column_energy: " + *violation);
  }
  double total = complexity_energy(stixels.stixels.size(), params);
  for (const Stixel& s : stixels.stixels) {
    const StixelHypothesis hyp{s.sclass, s.label,
                               s.distance.is_finite() ? s.distance.meters() : 0.0};
    for (std::size_t j = s.bottom; j <= s.top; ++j) {
      total += measurement_energy(hyp, column.cells[j],
                                  j > 0 ? &column.cells[j - 1] : nullptr, classes, params);
    }
  }
  return total;
}

}  // namespace stixels
