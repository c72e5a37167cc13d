#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "treebo/grid.hpp"
#include "treebo/tree_model.hpp"

namespace treebo {

/// Leaves of `tree` whose region intersects the continuous region of `box`,
/// found by descent that skips branches forced by the box. Preorder indices.
std::vector<int> reachable_leaves(const Tree& tree, const Box& box, const IntervalGrid& grid);

/// Minimum leaf value of one tree over a continuous region (lower, upper].
/// Exact for a single tree; equal thresholds are snapped within kThresholdTol.
double tree_min_over_box(const Tree& tree, std::span<const double> lower,
                         std::span<const double> upper);

/// base_offset + sum over trees of the per-tree minimum reachable leaf. A valid
/// lower bound on the ensemble prediction over the box (usually not tight).
double min_prediction_bound(const TreeEnsemble& ensemble, const Box& box, const IntervalGrid& grid);

/// Tighter bound by partition refinement: trees are grouped in consecutive
/// blocks of `group_size`; each group is minimized exactly over the box by
/// enumerating the coarse cells induced by the group's own thresholds. Groups
/// whose coarse-cell count exceeds `node_budget` fall back to per-tree minima.
/// Always >= min_prediction_bound and <= the true box minimum.
double partition_refine_bound(const TreeEnsemble& ensemble, const Box& box,
                              const IntervalGrid& grid, int group_size,
                              std::uint64_t node_budget = 10000);

}  // namespace treebo
