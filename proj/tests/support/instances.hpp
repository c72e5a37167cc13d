#pragma once

// Shared fixtures: seeded random problem instances and the independent
// oracles the solver is checked against (exhaustive cell enumeration for the
// penalty modes, dense evaluation grids for explore mode).

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "treebo/acquisition.hpp"
#include "treebo/bo.hpp"
#include "treebo/bounds.hpp"
#include "treebo/kmeans.hpp"
#include "treebo/rng.hpp"
#include "treebo/solver.hpp"
#include "treebo/train.hpp"

namespace treebo::testing {

template <typename F>
void for_each_cell(const IntervalGrid& grid, const Box& box, F&& fn) {
    const int n = grid.num_dims();
    std::vector<int> idx(box.lo);
    Box cell;
    cell.lo.resize(n);
    cell.hi.resize(n);
    while (true) {
        cell.lo = idx;
        cell.hi = idx;
        fn(cell);
        int d = 0;
        while (d < n) {
            if (++idx[d] <= box.hi[d]) break;
            idx[d] = box.lo[d];
            ++d;
        }
        if (d == n) break;
    }
}

inline std::vector<double> cell_midpoint(const IntervalGrid& grid, const Box& cell) {
    std::vector<double> m(grid.num_dims());
    for (int i = 0; i < grid.num_dims(); ++i)
        m[i] = 0.5 * (grid.edge(i, cell.lo[i]) + grid.edge(i, cell.hi[i] + 1));
    return m;
}

/// Exact minimum of the ensemble over a box, by exhaustive cell enumeration.
inline double box_min_oracle(const TreeEnsemble& ensemble, const IntervalGrid& grid,
                             const Box& box) {
    double best = std::numeric_limits<double>::infinity();
    for_each_cell(grid, box, [&](const Box& cell) {
        best = std::min(best, predict(ensemble, cell_midpoint(grid, cell)));
    });
    return best;
}

/// Exact penalty-mode optimum: per cell, the constant prediction plus kappa
/// times the nearest reference's box-projection distance.
inline double penalty_cell_oracle(const AcquisitionProblem& p) {
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> lo(p.grid.num_dims()), hi(p.grid.num_dims());
    for_each_cell(p.grid, full_box(p.grid), [&](const Box& cell) {
        for (int i = 0; i < p.grid.num_dims(); ++i) {
            lo[i] = p.grid.edge(i, cell.lo[i]);
            hi[i] = p.grid.edge(i, cell.hi[i] + 1);
        }
        double dist = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < p.refs.size(); ++k)
            dist = std::min(dist, min_dist_to_box(p.refs.point(k), lo, hi, p.standardizer,
                                                  p.metric));
        const double value = predict(p.ensemble, cell_midpoint(p.grid, cell)) + p.kappa * dist;
        best = std::min(best, value);
    });
    return best;
}

/// Dense lattice minimum of the acquisition (explore-mode oracle).
inline double dense_grid_oracle(const AcquisitionProblem& p, int points_per_axis) {
    const int n = p.grid.num_dims();
    const auto lower = p.grid.lower_bounds();
    const auto upper = p.grid.upper_bounds();
    std::vector<int> idx(n, 0);
    std::vector<double> x(n);
    double best = std::numeric_limits<double>::infinity();
    while (true) {
        for (int i = 0; i < n; ++i)
            x[i] = lower[i] + (upper[i] - lower[i]) * static_cast<double>(idx[i]) /
                                  static_cast<double>(points_per_axis - 1);
        best = std::min(best, evaluate_acquisition(p, x));
        int d = 0;
        while (d < n) {
            if (++idx[d] < points_per_axis) break;
            idx[d] = 0;
            ++d;
        }
        if (d == n) break;
    }
    return best;
}

/// A smooth random objective used to fit small test ensembles.
inline std::function<double(std::span<const double>)> random_objective(Rng& rng) {
    const double a = uniform_in(rng, -2.0, 2.0);
    const double b = uniform_in(rng, 0.5, 2.5);
    const double c = uniform_in(rng, -1.5, 1.5);
    return [=](std::span<const double> x) {
        double s = a;
        for (std::size_t i = 0; i < x.size(); ++i)
            s += b * std::sin(1.7 * x[i] + c) + 0.3 * x[i] * x[i] - c * x[i];
        return s;
    };
}

inline Dataset random_dataset(Rng& rng, int dims, int rows, std::span<const double> lower,
                              std::span<const double> upper) {
    auto f = random_objective(rng);
    std::vector<double> xs;
    std::vector<double> ys;
    for (int r = 0; r < rows; ++r) {
        const auto x = sample_uniform_point(rng, lower, upper);
        xs.insert(xs.end(), x.begin(), x.end());
        ys.push_back(f(x) + 0.05 * (uniform01(rng) - 0.5));
    }
    return Dataset(dims, std::move(xs), std::move(ys));
}

struct InstanceSpec {
    int dims = 2;
    Mode mode = Mode::Penalty;
    Metric metric = Metric::SquaredEuclidean;
    double kappa = 1.0;
    int max_trees = 6;
    int rows = 24;
    int clusters = 4;
};

/// A fully assembled random acquisition problem with modest cell counts
/// (<= ~350 cells in 3D, far under the oracle's 2000-cell budget).
inline AcquisitionProblem make_instance(std::uint64_t seed, const InstanceSpec& spec) {
    Rng rng = make_rng(seed);
    const double span = uniform_in(rng, 2.0, 6.0);
    std::vector<double> lower(spec.dims), upper(spec.dims);
    for (int i = 0; i < spec.dims; ++i) {
        lower[i] = uniform_in(rng, -3.0, 0.0);
        upper[i] = lower[i] + span;
    }
    Dataset data = random_dataset(rng, spec.dims, spec.rows, lower, upper);

    GBRTParams params;
    params.num_trees = 1 + static_cast<int>(uniform_index(rng, spec.max_trees));
    params.max_depth = 2 + static_cast<int>(uniform_index(rng, 2));
    params.max_leaves = spec.dims >= 3 ? 4 : 5;
    params.min_samples_leaf = 2;
    params.learning_rate = 0.7;

    AcquisitionProblem p;
    p.mode = spec.mode;
    p.metric = spec.metric;
    p.kappa = spec.kappa;
    p.ensemble = train(data, params);
    p.grid = build_interval_grid(p.ensemble, lower, upper);
    p.standardizer = fit_standardizer(data);
    if (spec.mode == Mode::ClusterPenalty) {
        const int k = std::min<int>(spec.clusters, static_cast<int>(data.size()));
        p.refs = kmeans(ReferenceSet::from_dataset(data, p.standardizer), k, seed);
    } else {
        p.refs = ReferenceSet::from_dataset(data, p.standardizer);
    }
    p.alpha_limit = spec.mode == Mode::Explore ? alpha_limit(0.5, data.targets())
                                               : 0.0;
    p.big_m = is_penalty(spec.mode) ? big_m(p.grid, p.standardizer, p.metric) : 0.0;
    p.validate();
    return p;
}

}  // namespace treebo::testing
