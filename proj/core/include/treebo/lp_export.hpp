#pragma once

#include <cstddef>
#include <filesystem>

#include "treebo/acquisition.hpp"

namespace treebo {

struct MipExportInfo {
    std::size_t num_x = 0;
    std::size_t num_y = 0;     // interval indicator binaries, sum of m_i
    std::size_t num_z = 0;     // leaf activation variables, sum of |L_t|
    std::size_t num_b = 0;     // big-M switch binaries (penalty modes)
    std::size_t num_r = 0;     // Manhattan r+/r- pairs, counted individually
    std::size_t num_dist = 0;  // per-reference distance variables (explore mode)
    std::size_t num_sos = 0;   // SOS1 complementarity sets (Manhattan)
    std::size_t num_constraints = 0;
    double big_m = 0.0;
    std::filesystem::path lp_path;
    std::filesystem::path manifest_path;
};

/// Writes the explicit mixed-integer formulation of the acquisition problem in
/// CPLEX LP format, plus a JSON manifest ("<lp path>.manifest.json") with the
/// variable counts and hyperparameters. Squared-Euclidean distances become
/// quadratic rows; Manhattan distances use r+/r- pairs with SOS1 sets.
MipExportInfo export_mip(const AcquisitionProblem& problem, const std::filesystem::path& lp_path);

}  // namespace treebo
