#include "treebo/bounds.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace treebo {

namespace {

// Shared descent: visit every leaf whose region intersects (lower, upper].
// A split at threshold t is forced left when the whole region satisfies
// x <= t, forced right when x > t holds throughout. The tolerance matches the
// grid's dedup tolerance so thresholds collapsed during grid construction make
// the same routing decision here.
template <typename Visit>
void visit_reachable(const Tree& tree, std::span<const double> lower,
                     std::span<const double> upper, Visit&& visit) {
    std::vector<int> stack{0};
    while (!stack.empty()) {
        const int i = stack.back();
        stack.pop_back();
        const TreeNode& node = tree.nodes[i];
        if (node.is_leaf()) {
            visit(i, node.value);
            continue;
        }
        const double t = node.threshold;
        const double lo = lower[node.feature];
        const double hi = upper[node.feature];
        if (t >= hi - kThresholdTol) {
            stack.push_back(node.left);
        } else if (t <= lo + kThresholdTol) {
            stack.push_back(node.right);
        } else {
            stack.push_back(node.right);
            stack.push_back(node.left);
        }
    }
}

}  // namespace

std::vector<int> reachable_leaves(const Tree& tree, const Box& box, const IntervalGrid& grid) {
    std::vector<double> lower, upper;
    box_bounds(grid, box, lower, upper);
    std::vector<int> leaves;
    visit_reachable(tree, lower, upper, [&](int idx, double) { leaves.push_back(idx); });
    std::sort(leaves.begin(), leaves.end());
    return leaves;
}

double tree_min_over_box(const Tree& tree, std::span<const double> lower,
                         std::span<const double> upper) {
    double best = std::numeric_limits<double>::infinity();
    visit_reachable(tree, lower, upper, [&](int, double value) {
        if (value < best) best = value;
    });
    return best;
}

double min_prediction_bound(const TreeEnsemble& ensemble, const Box& box,
                            const IntervalGrid& grid) {
    std::vector<double> lower, upper;
    box_bounds(grid, box, lower, upper);
    double sum = ensemble.base_offset;
    for (const Tree& tree : ensemble.trees) sum += tree_min_over_box(tree, lower, upper);
    return sum;
}

namespace {

// Interior grid-edge indices of `box` in dimension `dim` that some tree of the
// group splits on. Edge index j is a cut iff box.lo < j <= box.hi.
void collect_group_cuts(const TreeEnsemble& ensemble, std::size_t tree_begin,
                        std::size_t tree_end, const Box& box, const IntervalGrid& grid,
                        std::vector<std::vector<int>>& cuts) {
    const int n = grid.num_dims();
    cuts.assign(n, {});
    for (std::size_t t = tree_begin; t < tree_end; ++t) {
        for (const TreeNode& node : ensemble.trees[t].nodes) {
            if (node.is_leaf()) continue;
            const int i = node.feature;
            const auto& th = grid.dim(i).thresholds;
            // Snap the split threshold to its grid index (1-based edge index).
            auto it = std::lower_bound(th.begin(), th.end(), node.threshold - kThresholdTol);
            if (it == th.end() || *it > node.threshold + kThresholdTol) continue;  // outside domain
            const int j = static_cast<int>(it - th.begin()) + 1;
            if (j > box.lo[i] && j <= box.hi[i]) cuts[i].push_back(j);
        }
    }
    for (auto& c : cuts) {
        std::sort(c.begin(), c.end());
        c.erase(std::unique(c.begin(), c.end()), c.end());
    }
}

}  // namespace

double partition_refine_bound(const TreeEnsemble& ensemble, const Box& box,
                              const IntervalGrid& grid, int group_size,
                              std::uint64_t node_budget) {
    const std::size_t num_trees = ensemble.trees.size();
    if (group_size < 1 || static_cast<std::size_t>(group_size) > std::max<std::size_t>(num_trees, 1))
        throw std::invalid_argument("partition_refine_bound: group_size out of range");
    std::vector<double> lower, upper;
    box_bounds(grid, box, lower, upper);

    double total = ensemble.base_offset;
    std::vector<std::vector<int>> cuts;
    std::vector<double> cell_lower, cell_upper;
    const int n = grid.num_dims();

    for (std::size_t begin = 0; begin < num_trees; begin += group_size) {
        const std::size_t end = std::min(begin + group_size, num_trees);
        collect_group_cuts(ensemble, begin, end, box, grid, cuts);

        std::uint64_t cells = 1;
        bool over_budget = false;
        for (int i = 0; i < n && !over_budget; ++i) {
            cells *= static_cast<std::uint64_t>(cuts[i].size()) + 1;
            if (cells > node_budget) over_budget = true;
        }

        if (over_budget) {
            // Fall back to per-tree minima for this group.
            for (std::size_t t = begin; t < end; ++t)
                total += tree_min_over_box(ensemble.trees[t], lower, upper);
            continue;
        }

        // Exact group minimum: every tree of the group is constant on each
        // coarse cell, so one descent per tree evaluates it.
        double group_min = std::numeric_limits<double>::infinity();
        std::vector<int> idx(n, 0);
        cell_lower.resize(n);
        cell_upper.resize(n);
        while (true) {
            for (int i = 0; i < n; ++i) {
                const int e_lo = idx[i] == 0 ? box.lo[i] : cuts[i][idx[i] - 1];
                const int e_hi = idx[i] == static_cast<int>(cuts[i].size()) ? box.hi[i] + 1
                                                                            : cuts[i][idx[i]];
                cell_lower[i] = grid.edge(i, e_lo);
                cell_upper[i] = grid.edge(i, e_hi);
            }
            double value = 0.0;
            for (std::size_t t = begin; t < end; ++t)
                value += tree_min_over_box(ensemble.trees[t], cell_lower, cell_upper);
            if (value < group_min) group_min = value;

            int d = 0;
            while (d < n) {
                if (++idx[d] <= static_cast<int>(cuts[d].size())) break;
                idx[d] = 0;
                ++d;
            }
            if (d == n) break;
        }
        total += group_min;
    }
    return total;
}

}  // namespace treebo
