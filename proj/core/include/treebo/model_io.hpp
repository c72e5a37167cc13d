#pragma once

#include <filesystem>

#include "treebo/tree_model.hpp"

namespace treebo {

/// Versioned JSON model file. Nodes are stored in preorder with child
/// references by index; thresholds and leaf values round-trip binary64.
inline constexpr int kModelFormatVersion = 1;

void save_model(const TreeEnsemble& ensemble, const std::filesystem::path& path);
TreeEnsemble load_model(const std::filesystem::path& path);

}  // namespace treebo
