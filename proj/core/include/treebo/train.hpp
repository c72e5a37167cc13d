#pragma once

#include <cstdint>

#include "treebo/dataset.hpp"
#include "treebo/tree_model.hpp"

namespace treebo {

struct GBRTParams {
    int num_trees = 400;
    int max_depth = 3;
    int max_leaves = 5;
    int min_samples_leaf = 20;
    double learning_rate = 0.1;
    // Reserved for subsampling variants; the exact greedy trainer ignores it.
    std::uint64_t seed = 0;
};

/// Squared-loss gradient boosting: base_offset is the target mean, each stage
/// fits the residuals with a leaf-wise greedy regression tree (split search
/// over at most 256 quantile candidates per feature) scaled by learning_rate.
/// Fully deterministic.
TreeEnsemble train(const Dataset& data, const GBRTParams& params);

}  // namespace treebo
