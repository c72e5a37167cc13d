#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "treebo/tree_model.hpp"

namespace treebo {

/// Absolute tolerance under which two split thresholds collapse to one grid
/// value. Box/leaf reachability tests snap with the same tolerance.
inline constexpr double kThresholdTol = 1e-12;

/// Per-dimension ordered split thresholds inside a bounded domain. Dimension i
/// has edges lower = v_0 < v_1 < ... < v_m < v_{m+1} = upper; interval j
/// (0-based, j in [0, m]) is the half-open cell slice (v_j, v_{j+1}].
class IntervalGrid {
public:
    struct Dim {
        double lower = 0.0;
        double upper = 0.0;
        std::vector<double> thresholds;  // strictly increasing, inside (lower, upper)
    };

    IntervalGrid() = default;
    explicit IntervalGrid(std::vector<Dim> dims);

    int num_dims() const { return static_cast<int>(dims_.size()); }
    int num_thresholds(int i) const { return static_cast<int>(dims_[i].thresholds.size()); }
    int num_intervals(int i) const { return num_thresholds(i) + 1; }
    const Dim& dim(int i) const { return dims_[i]; }

    /// Edge j in [0, m_i + 1]: lower bound, the thresholds, upper bound.
    double edge(int i, int j) const {
        const Dim& d = dims_[i];
        if (j == 0) return d.lower;
        if (j == static_cast<int>(d.thresholds.size()) + 1) return d.upper;
        return d.thresholds[j - 1];
    }

    std::vector<double> lower_bounds() const;
    std::vector<double> upper_bounds() const;

    /// Total number of cells, saturating at UINT64_MAX on overflow.
    std::uint64_t cell_count() const;

    /// Interval index containing x (points at the lower domain edge map to 0).
    int interval_of(int i, double x) const;

private:
    std::vector<Dim> dims_;
};

/// Rectangular union of contiguous cells: per dimension the closed interval-
/// index range [lo_i, hi_i], i.e. the continuous region (v_lo, v_{hi+1}].
struct Box {
    std::vector<int> lo;
    std::vector<int> hi;

    bool operator==(const Box&) const = default;
    bool is_cell() const;
    std::uint64_t cell_count() const;
};

Box full_box(const IntervalGrid& grid);

/// Continuous bounds of a box (raw space), per dimension.
void box_bounds(const IntervalGrid& grid, const Box& box, std::vector<double>& lower,
                std::vector<double>& upper);

/// Collects the ensemble's split thresholds per dimension, drops those outside
/// the open domain, deduplicates (kThresholdTol) and sorts.
IntervalGrid build_interval_grid(const TreeEnsemble& ensemble, std::span<const double> lower,
                                 std::span<const double> upper);

}  // namespace treebo
