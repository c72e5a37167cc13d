#include "treebo/tree_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace treebo {

std::size_t Tree::num_leaves() const {
    std::size_t n = 0;
    for (const auto& node : nodes)
        if (node.is_leaf()) ++n;
    return n;
}

int Tree::leaf_index(std::span<const double> x) const {
    int i = 0;
    while (!nodes[i].is_leaf()) {
        const TreeNode& s = nodes[i];
        i = (x[s.feature] <= s.threshold) ? s.left : s.right;
    }
    return i;
}

std::vector<int> Tree::leaf_nodes() const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(nodes.size()); ++i)
        if (nodes[i].is_leaf()) out.push_back(i);
    return out;
}

double predict(const TreeEnsemble& ensemble, std::span<const double> x) {
    if (static_cast<int>(x.size()) != ensemble.num_features)
        throw std::invalid_argument("predict: point has dimension " + std::to_string(x.size()) +
                                    ", model expects " + std::to_string(ensemble.num_features));
    double sum = ensemble.base_offset;
    for (const Tree& t : ensemble.trees) sum += t.value_at(x);
    return sum;
}

namespace {

void validate_tree(const Tree& tree, int num_features, const std::string& where) {
    if (tree.nodes.empty()) throw std::invalid_argument(where + ": empty tree");
    const int n = static_cast<int>(tree.nodes.size());
    std::vector<int> seen(tree.nodes.size(), 0);
    // Iterative preorder walk from the root.
    std::vector<int> stack{0};
    while (!stack.empty()) {
        const int i = stack.back();
        stack.pop_back();
        if (i < 0 || i >= n)
            throw std::invalid_argument(where + ": child index " + std::to_string(i) +
                                        " out of range");
        if (seen[i]++) throw std::invalid_argument(where + " node " + std::to_string(i) +
                                                   ": reachable twice (not a tree)");
        const TreeNode& node = tree.nodes[i];
        const std::string at = where + " node " + std::to_string(i);
        if (node.is_leaf()) {
            if (!std::isfinite(node.value))
                throw std::invalid_argument(at + ": non-finite leaf value");
        } else {
            if (node.feature >= num_features)
                throw std::invalid_argument(at + ": feature index " +
                                            std::to_string(node.feature) + " out of range");
            if (!std::isfinite(node.threshold))
                throw std::invalid_argument(at + ": non-finite threshold");
            stack.push_back(node.right);
            stack.push_back(node.left);
        }
    }
    for (std::size_t i = 0; i < seen.size(); ++i)
        if (!seen[i])
            throw std::invalid_argument(where + " node " + std::to_string(i) + ": unreachable");
}

}  // namespace

void validate_ensemble(const TreeEnsemble& ensemble) {
    if (ensemble.num_features <= 0)
        throw std::invalid_argument("ensemble: num_features must be positive");
    if (!std::isfinite(ensemble.base_offset))
        throw std::invalid_argument("ensemble: non-finite base_offset");
    for (std::size_t t = 0; t < ensemble.trees.size(); ++t)
        validate_tree(ensemble.trees[t], ensemble.num_features, "tree " + std::to_string(t));
}

}  // namespace treebo
