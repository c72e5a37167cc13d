#include "treebo/model_io.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace treebo {

using nlohmann::json;

void save_model(const TreeEnsemble& ensemble, const std::filesystem::path& path) {
    json doc;
    doc["version"] = kModelFormatVersion;
    doc["num_features"] = ensemble.num_features;
    doc["base_offset"] = ensemble.base_offset;
    json trees = json::array();
    for (const Tree& tree : ensemble.trees) {
        json nodes = json::array();
        for (const TreeNode& n : tree.nodes) {
            if (n.is_leaf()) {
                nodes.push_back({{"value", n.value}});
            } else {
                nodes.push_back({{"feature", n.feature},
                                 {"threshold", n.threshold},
                                 {"left", n.left},
                                 {"right", n.right}});
            }
        }
        trees.push_back({{"nodes", std::move(nodes)}});
    }
    doc["trees"] = std::move(trees);

    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write model file '" + path.string() + "'");
    out << doc.dump(2) << "\n";
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

TreeEnsemble load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file '" + path.string() + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw std::runtime_error("model file '" + path.string() + "': " + e.what());
    }

    const std::string where = "model file '" + path.string() + "'";
    try {
        if (!doc.contains("version"))
            throw std::runtime_error(where + ": missing version field");
        const int version = doc.at("version").get<int>();
        if (version != kModelFormatVersion)
            throw std::runtime_error(where + ": unsupported model format version " +
                                     std::to_string(version) + " (supported: " +
                                     std::to_string(kModelFormatVersion) + ")");

        TreeEnsemble ensemble;
        ensemble.num_features = doc.at("num_features").get<int>();
        ensemble.base_offset = doc.at("base_offset").get<double>();
        const json& trees = doc.at("trees");
        if (!trees.is_array()) throw std::runtime_error(where + ": 'trees' must be an array");
        for (std::size_t t = 0; t < trees.size(); ++t) {
            const std::string at = where + ": tree " + std::to_string(t);
            const json& jnodes = trees[t].at("nodes");
            if (!jnodes.is_array() || jnodes.empty())
                throw std::runtime_error(at + ": 'nodes' must be a non-empty array");
            Tree tree;
            for (std::size_t k = 0; k < jnodes.size(); ++k) {
                const json& jn = jnodes[k];
                TreeNode node;
                if (jn.contains("value")) {
                    node.value = jn.at("value").get<double>();
                } else if (jn.contains("feature")) {
                    node.feature = jn.at("feature").get<int>();
                    node.threshold = jn.at("threshold").get<double>();
                    node.left = jn.at("left").get<int>();
                    node.right = jn.at("right").get<int>();
                    if (node.feature < 0)
                        throw std::runtime_error(at + " node " + std::to_string(k) +
                                                 ": negative feature index");
                } else {
                    throw std::runtime_error(at + " node " + std::to_string(k) +
                                             ": needs either 'value' or 'feature'");
                }
                tree.nodes.push_back(node);
            }
            ensemble.trees.push_back(std::move(tree));
        }
        try {
            validate_ensemble(ensemble);
        } catch (const std::invalid_argument& e) {
            throw std::runtime_error(where + ": " + e.what());
        }
        return ensemble;
    } catch (const json::exception& e) {
        throw std::runtime_error(where + ": " + e.what());
    }
}

}  // namespace treebo
