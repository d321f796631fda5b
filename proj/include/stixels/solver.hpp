#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "stixels/likelihood.hpp"
#include "stixels/model.hpp"

namespace stixels {

/// Work counters of one or more column solves.
struct SolveStats {
  /// (bottom, top, label) triples scored by the dynamic program.
  std::size_t segment_evaluations = 0;
  /// Object distance candidates scored across all segments.
  std::size_t candidate_evaluations = 0;
  /// Object segments whose best candidate was refined by a reweighting step.
  std::size_t refinements = 0;

  SolveStats& operator+=(const SolveStats& o) {
    segment_evaluations += o.segment_evaluations;
    candidate_evaluations += o.candidate_evaluations;
    refinements += o.refinements;
    return *this;
  }
};

struct SegmentCost {
  double energy = kInfiniteEnergy;
  StixelDistance distance = StixelDistance::none();
};

/// Minimal data energy of every segment [bottom, top] of one column, per
/// structural class, together with the fitted stixel distance. Semantic terms
/// are kept as per-label prefix sums so label queries are O(1).
///
/// Object distances are chosen among the measured ranges of the segment's
/// valid rows; the winner is then moved by one inlier-reweighted mean step
/// and kept only if that lowers the energy. Ground distances are the
/// horizontal distance of the topmost valid row. Sky distances are infinite.
class SegmentCostTable {
 public:
  SegmentCostTable(const ScanColumn& column, const ScanClasses& classes,
                   const ModelParams& params);

  std::size_t height() const { return height_; }

  /// Label-independent part for a structural class: weighted geometry,
  /// including the object distance fit.
  SegmentCost geometry(std::size_t bottom, std::size_t top, StructuralClass c) const;

  /// Weighted semantic energy of labelling rows bottom..top with `label`.
  double semantic(std::size_t bottom, std::size_t top, std::size_t label) const;

  /// Full data energy of the segment for `label` (class implied by the label).
  SegmentCost cost(std::size_t bottom, std::size_t top, std::size_t label) const;

  const ClassSet& labels() const { return *labels_; }
  const SolveStats& stats() const { return stats_; }

 private:
  std::size_t index(std::size_t bottom, std::size_t top) const {
    return bottom * height_ + top;
  }

  std::size_t height_;
  const ClassSet* labels_;
  // [class][bottom * h + top]
  std::vector<double> geometry_[kNumStructuralClasses];
  std::vector<double> object_distance_;
  std::vector<double> ground_distance_;
  std::vector<int> top_valid_row_;  // highest valid row <= index, or -1
  Eigen::MatrixXd semantic_prefix_;  // (h + 1) x labels
  SolveStats stats_;
};

/// Data energy and fitted distance of rows bottom..top (0-based, inclusive)
/// as one stixel with `label`. Throws std::invalid_argument when the label's
/// structural class differs from `sclass` or the rows are out of range.
SegmentCost segment_cost(const ScanColumn& column, const ScanClasses& classes,
                         std::size_t bottom, std::size_t top, StructuralClass sclass,
                         std::size_t label, const ModelParams& params);

struct ColumnSolution {
  StixelColumn column;
  double energy = 0.0;
  SolveStats stats;
};

/// Exact minimum-energy segmentation of one column. Among equal energies the
/// result has the fewest stixels, then the lowest first differing cut, then
/// the lowest label indices bottom to top. Throws std::invalid_argument for an
/// empty column.
ColumnSolution solve_column(const ScanColumn& column, const ScanClasses& classes,
                            const ModelParams& params);

struct SolveOptions {
  /// Worker threads; 0 or 1 solves sequentially.
  unsigned threads = 1;
};

/// Solves every column; the output does not depend on `options.threads`.
/// A failing column is reported as std::runtime_error naming its index.
StixelWorld solve_scan(const Scan& scan, const ModelParams& params,
                       const SolveOptions& options = {}, SolveStats* stats = nullptr);

/// Recomputes the energy of a given segmentation term by term, row by row:
/// data terms of every measurement under its covering stixel plus the
/// complexity prior.
double column_energy(const StixelColumn& stixels, const ScanColumn& column,
                     const ScanClasses& classes, const ModelParams& params);

}  // namespace stixels
