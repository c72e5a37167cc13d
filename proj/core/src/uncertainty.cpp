#include "treebo/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace treebo {

std::string to_string(Metric m) {
    return m == Metric::Manhattan ? "manhattan" : "squared_euclidean";
}

Metric metric_from_string(const std::string& s) {
    if (s == "manhattan" || s == "l1") return Metric::Manhattan;
    if (s == "squared_euclidean" || s == "l2" || s == "euclidean")
        return Metric::SquaredEuclidean;
    throw std::invalid_argument("unknown metric '" + s + "' (use l1, l2)");
}

ReferenceSet::ReferenceSet(Kind kind, int dim, std::vector<double> flat_points)
    : kind_(kind), dim_(dim), flat_(std::move(flat_points)) {
    if (dim_ <= 0) throw std::invalid_argument("reference set: dimension must be positive");
    if (flat_.empty() || flat_.size() % static_cast<std::size_t>(dim_) != 0)
        throw std::invalid_argument("reference set: point data not a multiple of dimension");
    count_ = flat_.size() / static_cast<std::size_t>(dim_);
    for (double v : flat_)
        if (!std::isfinite(v)) throw std::invalid_argument("reference set: non-finite coordinate");
}

ReferenceSet ReferenceSet::from_dataset(const Dataset& data, const Standardizer& std) {
    std::vector<double> flat;
    flat.reserve(data.size() * static_cast<std::size_t>(data.num_features()));
    for (std::size_t r = 0; r < data.size(); ++r) {
        auto row = data.row(r);
        for (int i = 0; i < data.num_features(); ++i) flat.push_back(std.to_std(i, row[i]));
    }
    return ReferenceSet(Kind::Data, data.num_features(), std::move(flat));
}

double distance(std::span<const double> x, std::span<const double> ref, const Standardizer& std,
                Metric metric) {
    if (x.size() != ref.size() || static_cast<int>(x.size()) != std.dim())
        throw std::invalid_argument("distance: dimension mismatch");
    double acc = 0.0;
    if (metric == Metric::Manhattan) {
        for (std::size_t i = 0; i < x.size(); ++i)
            acc += std::abs(std.to_std(static_cast<int>(i), x[i]) - ref[i]);
    } else {
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double d = std.to_std(static_cast<int>(i), x[i]) - ref[i];
            acc += d * d;
        }
    }
    return acc;
}

double min_distance(std::span<const double> x, const ReferenceSet& refs, const Standardizer& std,
                    Metric metric) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < refs.size(); ++k)
        best = std::min(best, distance(x, refs.point(k), std, metric));
    return best;
}

double alpha_limit(double zeta, std::span<const double> targets) {
    if (zeta < 0.0) throw std::invalid_argument("alpha_limit: zeta must be non-negative");
    if (targets.empty()) throw std::invalid_argument("alpha_limit: empty targets");
    double mean = 0.0;
    for (double y : targets) mean += y;
    mean /= static_cast<double>(targets.size());
    double var = 0.0;
    for (double y : targets) var += (y - mean) * (y - mean);
    var /= static_cast<double>(targets.size());
    return zeta * var;
}

double big_m(const IntervalGrid& grid, const Standardizer& std, Metric metric) {
    double m = 0.0;
    for (int i = 0; i < grid.num_dims(); ++i) {
        const double extent = (grid.dim(i).upper - grid.dim(i).lower) / std.std[i];
        m += metric == Metric::Manhattan ? extent : extent * extent;
    }
    return m;
}

std::vector<double> project_to_box(std::span<const double> ref, std::span<const double> lower,
                                   std::span<const double> upper, const Standardizer& std) {
    std::vector<double> x(ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i)
        x[i] = std::clamp(std.to_raw(static_cast<int>(i), ref[i]), lower[i], upper[i]);
    return x;
}

double min_dist_to_box(std::span<const double> ref, std::span<const double> lower,
                       std::span<const double> upper, const Standardizer& std, Metric metric) {
    double acc = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        const double raw = std.to_raw(static_cast<int>(i), ref[i]);
        const double proj = std::clamp(raw, lower[i], upper[i]);
        const double d = std::abs(std.to_std(static_cast<int>(i), proj) - ref[i]);
        acc += metric == Metric::Manhattan ? d : d * d;
    }
    return acc;
}

double max_dist_to_box(std::span<const double> ref, std::span<const double> lower,
                       std::span<const double> upper, const Standardizer& std, Metric metric) {
    double acc = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        const int d = static_cast<int>(i);
        const double far =
            std::max(std::abs(std.to_std(d, upper[i]) - ref[i]),
                     std::abs(ref[i] - std.to_std(d, lower[i])));
        acc += metric == Metric::Manhattan ? far : far * far;
    }
    return acc;
}

}  // namespace treebo
