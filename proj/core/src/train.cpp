#include "treebo/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace treebo {

namespace {

constexpr int kMaxSplitCandidates = 256;

struct SplitChoice {
    double gain = 0.0;
    int feature = -1;
    double threshold = 0.0;
    bool valid() const { return feature >= 0; }
};

// Node of the growing tree; children are filled in once the node is split.
struct BuildNode {
    std::vector<std::size_t> rows;
    int depth = 0;
    double mean = 0.0;
    SplitChoice split;  // best candidate split, computed lazily
    int left = -1, right = -1;
};

double mean_residual(const std::vector<double>& residual, const std::vector<std::size_t>& rows) {
    double s = 0.0;
    for (std::size_t r : rows) s += residual[r];
    return s / static_cast<double>(rows.size());
}

// Exact greedy search: maximize S_L^2/n_L + S_R^2/n_R - S^2/n over candidate
// thresholds (midpoints between consecutive distinct values, subsampled to at
// most 256 quantile positions). Ties resolve to the lowest feature, then the
// lowest threshold.
SplitChoice best_split(const Dataset& data, const std::vector<double>& residual,
                       const std::vector<std::size_t>& rows, int min_samples_leaf) {
    SplitChoice best;
    const std::size_t n = rows.size();
    if (n < 2 * static_cast<std::size_t>(min_samples_leaf)) return best;

    std::vector<std::pair<double, double>> vals(n);  // (feature value, residual)
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) total += residual[rows[k]];
    const double parent_score = total * total / static_cast<double>(n);

    for (int feat = 0; feat < data.num_features(); ++feat) {
        for (std::size_t k = 0; k < n; ++k)
            vals[k] = {data.row(rows[k])[feat], residual[rows[k]]};
        std::sort(vals.begin(), vals.end());

        // Gap positions between distinct consecutive values.
        std::vector<std::size_t> gaps;
        for (std::size_t k = 0; k + 1 < n; ++k)
            if (vals[k].first < vals[k + 1].first) gaps.push_back(k);
        if (gaps.empty()) continue;
        if (static_cast<int>(gaps.size()) > kMaxSplitCandidates) {
            std::vector<std::size_t> picked(kMaxSplitCandidates);
            for (int q = 0; q < kMaxSplitCandidates; ++q)
                picked[q] = gaps[(q + 1) * gaps.size() / (kMaxSplitCandidates + 1)];
            picked.erase(std::unique(picked.begin(), picked.end()), picked.end());
            gaps = std::move(picked);
        }

        double prefix = 0.0;
        std::size_t pos = 0;
        for (std::size_t g : gaps) {
            while (pos <= g) prefix += vals[pos++].second;
            const std::size_t n_left = g + 1;
            const std::size_t n_right = n - n_left;
            if (n_left < static_cast<std::size_t>(min_samples_leaf) ||
                n_right < static_cast<std::size_t>(min_samples_leaf))
                continue;
            const double s_right = total - prefix;
            const double gain = prefix * prefix / static_cast<double>(n_left) +
                                s_right * s_right / static_cast<double>(n_right) - parent_score;
            if (gain > best.gain) {
                best.gain = gain;
                best.feature = feat;
                best.threshold = vals[g].first + 0.5 * (vals[g + 1].first - vals[g].first);
            }
        }
    }
    return best;
}

Tree fit_tree(const Dataset& data, const std::vector<double>& residual, const GBRTParams& params) {
    std::vector<BuildNode> nodes(1);
    nodes[0].rows.resize(data.size());
    std::iota(nodes[0].rows.begin(), nodes[0].rows.end(), 0);
    nodes[0].mean = mean_residual(residual, nodes[0].rows);
    nodes[0].split = best_split(data, residual, nodes[0].rows, params.min_samples_leaf);

    std::vector<int> leaves{0};
    while (static_cast<int>(leaves.size()) < params.max_leaves) {
        // Leaf-wise growth: split the open leaf with the largest gain. Equal
        // gains go to the oldest node for determinism.
        int pick = -1;
        for (int leaf : leaves) {
            const BuildNode& cand = nodes[leaf];
            if (cand.depth >= params.max_depth || !cand.split.valid()) continue;
            if (pick < 0 || cand.split.gain > nodes[pick].split.gain) pick = leaf;
        }
        if (pick < 0) break;

        BuildNode& parent = nodes[pick];
        std::vector<std::size_t> left_rows, right_rows;
        for (std::size_t r : parent.rows) {
            if (data.row(r)[parent.split.feature] <= parent.split.threshold)
                left_rows.push_back(r);
            else
                right_rows.push_back(r);
        }

        const int left_id = static_cast<int>(nodes.size());
        const int right_id = left_id + 1;
        parent.left = left_id;
        parent.right = right_id;
        const int child_depth = parent.depth + 1;
        parent.rows.clear();
        parent.rows.shrink_to_fit();

        nodes.emplace_back();
        nodes.emplace_back();
        nodes[left_id].rows = std::move(left_rows);
        nodes[left_id].depth = child_depth;
        nodes[left_id].mean = mean_residual(residual, nodes[left_id].rows);
        nodes[right_id].rows = std::move(right_rows);
        nodes[right_id].depth = child_depth;
        nodes[right_id].mean = mean_residual(residual, nodes[right_id].rows);
        if (child_depth < params.max_depth) {
            nodes[left_id].split = best_split(data, residual, nodes[left_id].rows,
                                              params.min_samples_leaf);
            nodes[right_id].split = best_split(data, residual, nodes[right_id].rows,
                                               params.min_samples_leaf);
        }

        leaves.erase(std::find(leaves.begin(), leaves.end(), pick));
        leaves.push_back(left_id);
        leaves.push_back(right_id);
    }

    // Flatten to preorder with the leaf values scaled by the learning rate.
    Tree tree;
    std::vector<int> slot_of(nodes.size(), -1);
    std::vector<int> order;
    std::vector<int> walk{0};
    while (!walk.empty()) {
        const int b = walk.back();
        walk.pop_back();
        order.push_back(b);
        if (nodes[b].left >= 0) {
            walk.push_back(nodes[b].right);
            walk.push_back(nodes[b].left);
        }
    }
    for (std::size_t k = 0; k < order.size(); ++k) slot_of[order[k]] = static_cast<int>(k);
    tree.nodes.resize(order.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        const BuildNode& src = nodes[order[k]];
        TreeNode& dst = tree.nodes[k];
        if (src.left >= 0) {
            dst.feature = src.split.feature;
            dst.threshold = src.split.threshold;
            dst.left = slot_of[src.left];
            dst.right = slot_of[src.right];
        } else {
            dst.value = params.learning_rate * src.mean;
        }
    }
    return tree;
}

}  // namespace

TreeEnsemble train(const Dataset& data, const GBRTParams& params) {
    if (data.size() == 0) throw std::invalid_argument("train: empty dataset");
    if (params.num_trees < 1) throw std::invalid_argument("train: num_trees must be >= 1");
    if (params.max_depth < 1) throw std::invalid_argument("train: max_depth must be >= 1");
    if (params.max_leaves < 2) throw std::invalid_argument("train: max_leaves must be >= 2");
    if (params.min_samples_leaf < 1)
        throw std::invalid_argument("train: min_samples_leaf must be >= 1");
    if (!(params.learning_rate > 0.0) || params.learning_rate > 1.0)
        throw std::invalid_argument("train: learning_rate must be in (0, 1]");

    TreeEnsemble ensemble;
    ensemble.num_features = data.num_features();
    double mean = 0.0;
    for (std::size_t r = 0; r < data.size(); ++r) mean += data.target(r);
    ensemble.base_offset = mean / static_cast<double>(data.size());

    std::vector<double> residual(data.size());
    for (std::size_t r = 0; r < data.size(); ++r)
        residual[r] = data.target(r) - ensemble.base_offset;

    ensemble.trees.reserve(params.num_trees);
    for (int t = 0; t < params.num_trees; ++t) {
        Tree tree = fit_tree(data, residual, params);
        for (std::size_t r = 0; r < data.size(); ++r)
            residual[r] -= tree.value_at(data.row(r));
        ensemble.trees.push_back(std::move(tree));
    }
    return ensemble;
}

}  // namespace treebo
