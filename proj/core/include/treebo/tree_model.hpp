#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace treebo {

/// One node of a regression tree. Nodes live in a flat preorder array; split
/// nodes reference their children by index, leaves carry the fitted value.
struct TreeNode {
    int feature = -1;        // -1 marks a leaf
    double threshold = 0.0;  // split: x[feature] <= threshold goes left
    int left = -1;
    int right = -1;
    double value = 0.0;  // leaf value F_{t,l}

    bool is_leaf() const { return feature < 0; }
    bool operator==(const TreeNode&) const = default;
};

struct Tree {
    std::vector<TreeNode> nodes;  // root at index 0

    bool operator==(const Tree&) const = default;
    std::size_t num_leaves() const;
    std::size_t num_splits() const { return nodes.size() - num_leaves(); }
    /// Leaf reached by root-to-leaf traversal of x ("<= goes left").
    int leaf_index(std::span<const double> x) const;
    double value_at(std::span<const double> x) const { return nodes[leaf_index(x)].value; }
    /// Node indices of all leaves, in preorder.
    std::vector<int> leaf_nodes() const;
};

/// Additive ensemble: prediction = base_offset + sum of per-tree leaf values.
struct TreeEnsemble {
    std::vector<Tree> trees;
    double base_offset = 0.0;
    int num_features = 0;

    bool operator==(const TreeEnsemble&) const = default;
};

double predict(const TreeEnsemble& ensemble, std::span<const double> x);

/// Structural validation: child indices in range, every node reachable exactly
/// once from the root, finite values. Throws std::invalid_argument with the
/// offending tree/node named.
void validate_ensemble(const TreeEnsemble& ensemble);

}  // namespace treebo
