#pragma once

#include <span>
#include <string>
#include <vector>

#include "treebo/dataset.hpp"
#include "treebo/grid.hpp"

namespace treebo {

enum class Metric {
    SquaredEuclidean,  // p = 2, squared
    Manhattan,         // p = 1
};

std::string to_string(Metric m);
Metric metric_from_string(const std::string& s);

/// Reference points the uncertainty measure is anchored to, stored in
/// standardized coordinates: either the data points themselves or k-means
/// cluster centers.
class ReferenceSet {
public:
    enum class Kind { Data, Cluster };

    ReferenceSet() = default;
    ReferenceSet(Kind kind, int dim, std::vector<double> flat_points);

    /// Standardizes every dataset row.
    static ReferenceSet from_dataset(const Dataset& data, const Standardizer& std);

    bool operator==(const ReferenceSet&) const = default;

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }
    std::size_t size() const { return count_; }
    std::span<const double> point(std::size_t k) const {
        return {flat_.data() + k * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
    }

private:
    Kind kind_ = Kind::Data;
    int dim_ = 0;
    std::size_t count_ = 0;
    std::vector<double> flat_;
};

/// Distance from a raw-space point to one standardized reference point:
/// squared Euclidean or Manhattan norm of sigma^-1 (x - mu) - ref.
double distance(std::span<const double> x, std::span<const double> ref, const Standardizer& std,
                Metric metric);

/// Minimum distance over a reference set.
double min_distance(std::span<const double> x, const ReferenceSet& refs, const Standardizer& std,
                    Metric metric);

/// Exploration cap: zeta times the population variance of the raw targets.
double alpha_limit(double zeta, std::span<const double> targets);

/// Constant large enough to dominate any in-domain distance, per metric:
/// sum_i sigma_i^-1 (vU_i - vL_i) for Manhattan, the sum of squares for
/// squared Euclidean.
double big_m(const IntervalGrid& grid, const Standardizer& std, Metric metric);

/// Exact minimum of distance(., ref) over the closed box [lower, upper] (raw
/// space): the clamped projection of the destandardized reference. O(n).
double min_dist_to_box(std::span<const double> ref, std::span<const double> lower,
                       std::span<const double> upper, const Standardizer& std, Metric metric);

/// Exact maximum of distance(., ref) over the box: per dimension the farther
/// of the two box edges in standardized space.
double max_dist_to_box(std::span<const double> ref, std::span<const double> lower,
                       std::span<const double> upper, const Standardizer& std, Metric metric);

/// Raw-space coordinates of the box projection realizing min_dist_to_box.
std::vector<double> project_to_box(std::span<const double> ref, std::span<const double> lower,
                                   std::span<const double> upper, const Standardizer& std);

}  // namespace treebo
