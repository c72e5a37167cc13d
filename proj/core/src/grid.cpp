#include "treebo/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace treebo {

IntervalGrid::IntervalGrid(std::vector<Dim> dims) : dims_(std::move(dims)) {
    for (std::size_t i = 0; i < dims_.size(); ++i) {
        const Dim& d = dims_[i];
        const std::string where = "grid dim " + std::to_string(i);
        if (!(d.lower < d.upper)) throw std::invalid_argument(where + ": degenerate bounds");
        double prev = d.lower;
        for (double t : d.thresholds) {
            if (!(t > prev)) throw std::invalid_argument(where + ": thresholds not increasing");
            prev = t;
        }
        if (!d.thresholds.empty() && !(d.thresholds.back() < d.upper))
            throw std::invalid_argument(where + ": threshold at or above upper bound");
    }
}

std::vector<double> IntervalGrid::lower_bounds() const {
    std::vector<double> out(dims_.size());
    for (std::size_t i = 0; i < dims_.size(); ++i) out[i] = dims_[i].lower;
    return out;
}

std::vector<double> IntervalGrid::upper_bounds() const {
    std::vector<double> out(dims_.size());
    for (std::size_t i = 0; i < dims_.size(); ++i) out[i] = dims_[i].upper;
    return out;
}

std::uint64_t IntervalGrid::cell_count() const {
    std::uint64_t n = 1;
    for (int i = 0; i < num_dims(); ++i) {
        const std::uint64_t k = static_cast<std::uint64_t>(num_intervals(i));
        if (n > std::numeric_limits<std::uint64_t>::max() / k)
            return std::numeric_limits<std::uint64_t>::max();
        n *= k;
    }
    return n;
}

int IntervalGrid::interval_of(int i, double x) const {
    const auto& t = dims_[i].thresholds;
    // Cell j covers (v_j, v_{j+1}]: count thresholds strictly below x.
    const auto it = std::lower_bound(t.begin(), t.end(), x);
    return static_cast<int>(it - t.begin());
}

bool Box::is_cell() const {
    for (std::size_t i = 0; i < lo.size(); ++i)
        if (lo[i] != hi[i]) return false;
    return true;
}

std::uint64_t Box::cell_count() const {
    std::uint64_t n = 1;
    for (std::size_t i = 0; i < lo.size(); ++i) {
        const std::uint64_t k = static_cast<std::uint64_t>(hi[i] - lo[i] + 1);
        if (n > std::numeric_limits<std::uint64_t>::max() / k)
            return std::numeric_limits<std::uint64_t>::max();
        n *= k;
    }
    return n;
}

Box full_box(const IntervalGrid& grid) {
    Box b;
    b.lo.assign(grid.num_dims(), 0);
    b.hi.resize(grid.num_dims());
    for (int i = 0; i < grid.num_dims(); ++i) b.hi[i] = grid.num_intervals(i) - 1;
    return b;
}

void box_bounds(const IntervalGrid& grid, const Box& box, std::vector<double>& lower,
                std::vector<double>& upper) {
    const int n = grid.num_dims();
    lower.resize(n);
    upper.resize(n);
    for (int i = 0; i < n; ++i) {
        lower[i] = grid.edge(i, box.lo[i]);
        upper[i] = grid.edge(i, box.hi[i] + 1);
    }
}

IntervalGrid build_interval_grid(const TreeEnsemble& ensemble, std::span<const double> lower,
                                 std::span<const double> upper) {
    const int n = ensemble.num_features;
    if (static_cast<int>(lower.size()) != n || static_cast<int>(upper.size()) != n)
        throw std::invalid_argument("build_interval_grid: bounds dimension mismatch");
    std::vector<IntervalGrid::Dim> dims(n);
    for (int i = 0; i < n; ++i) {
        if (!(lower[i] < upper[i]))
            throw std::invalid_argument("build_interval_grid: degenerate bounds in dim " +
                                        std::to_string(i));
        dims[i].lower = lower[i];
        dims[i].upper = upper[i];
    }
    for (const Tree& tree : ensemble.trees)
        for (const TreeNode& node : tree.nodes)
            if (!node.is_leaf()) {
                const double t = node.threshold;
                if (t > lower[node.feature] && t < upper[node.feature])
                    dims[node.feature].thresholds.push_back(t);
            }
    for (auto& d : dims) {
        std::sort(d.thresholds.begin(), d.thresholds.end());
        std::vector<double> dedup;
        for (double t : d.thresholds)
            if (dedup.empty() || t - dedup.back() > kThresholdTol) dedup.push_back(t);
        d.thresholds = std::move(dedup);
    }
    return IntervalGrid(std::move(dims));
}

}  // namespace treebo
