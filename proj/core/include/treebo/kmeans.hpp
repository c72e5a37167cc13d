#pragma once

#include <cstdint>

#include "treebo/uncertainty.hpp"

namespace treebo {

/// Lloyd's algorithm on standardized points. Initial centers are k distinct
/// points drawn uniformly without replacement from the seeded stream; iteration
/// stops at an assignment fixpoint or after max_iters. Empty clusters keep
/// their previous center. Deterministic for a fixed seed.
ReferenceSet kmeans(const ReferenceSet& points, int k, std::uint64_t seed, int max_iters = 100);

}  // namespace treebo
