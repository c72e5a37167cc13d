#include "treebo/kmeans.hpp"

#include <limits>
#include <stdexcept>

#include "treebo/rng.hpp"

namespace treebo {

ReferenceSet kmeans(const ReferenceSet& points, int k, std::uint64_t seed, int max_iters) {
    const std::size_t n = points.size();
    const int dim = points.dim();
    if (k < 1 || static_cast<std::size_t>(k) > n)
        throw std::invalid_argument("kmeans: k must be in [1, number of points]");

    Rng rng = make_rng(seed);
    const auto init = sample_without_replacement(rng, n, static_cast<std::size_t>(k));
    std::vector<double> centers(static_cast<std::size_t>(k) * dim);
    for (int c = 0; c < k; ++c) {
        auto p = points.point(init[c]);
        for (int i = 0; i < dim; ++i) centers[c * dim + i] = p[i];
    }

    std::vector<int> assign(n, -1);
    for (int iter = 0; iter < max_iters; ++iter) {
        bool changed = false;
        for (std::size_t r = 0; r < n; ++r) {
            auto p = points.point(r);
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                double d = 0.0;
                for (int i = 0; i < dim; ++i) {
                    const double diff = p[i] - centers[c * dim + i];
                    d += diff * diff;
                }
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (assign[r] != best) {
                assign[r] = best;
                changed = true;
            }
        }
        if (!changed) break;

        std::vector<double> sums(static_cast<std::size_t>(k) * dim, 0.0);
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t r = 0; r < n; ++r) {
            auto p = points.point(r);
            for (int i = 0; i < dim; ++i) sums[assign[r] * dim + i] += p[i];
            ++counts[assign[r]];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[c] == 0) continue;  // keep previous center
            for (int i = 0; i < dim; ++i)
                centers[c * dim + i] = sums[c * dim + i] / static_cast<double>(counts[c]);
        }
    }
    return ReferenceSet(ReferenceSet::Kind::Cluster, dim, std::move(centers));
}

}  // namespace treebo
