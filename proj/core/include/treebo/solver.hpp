#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "treebo/acquisition.hpp"
#include "treebo/bounds.hpp"

namespace treebo {

/// Per-iteration snapshot handed to SolverConfig::on_progress.
struct SolveProgress {
    double upper_bound = 0.0;
    double lower_bound = 0.0;
    std::uint64_t nodes = 0;
};

struct SolverConfig {
    double rel_gap = 1e-4;      // relative optimality gap, (ub - lb) / max(1, |ub|)
    double time_limit = 120.0;  // seconds
    int lookahead = 200;        // strong-branching candidates; < 1 = first-found branching
    int group_size = 20;        // partition-refinement group size; 1 = per-tree bound only
    std::uint64_t refine_cell_budget = 10000;  // coarse cells per group before fallback
    std::uint64_t max_nodes = UINT64_MAX;
    std::uint64_t seed = 0;
    std::function<void(const SolveProgress&)> on_progress;  // optional observer

    void validate() const;
};

enum class Termination { Gap, Time, NodeLimit };
std::string to_string(Termination t);

struct SolveResult {
    std::vector<double> x_next;
    double upper_bound = 0.0;
    double lower_bound = 0.0;
    double rel_gap = 0.0;
    std::uint64_t nodes_explored = 0;
    double wall_time = 0.0;
    Termination termination = Termination::Gap;
};

/// One branch-and-bound node. `lower`/`upper` is the continuous region: the
/// box region for grid nodes, or a bisected sub-cell region in explore mode.
struct BnBNode {
    Box box;
    std::vector<double> lower;
    std::vector<double> upper;
    double lower_bound = 0.0;
    double alpha_term = 0.0;  // signed, kappa-scaled distance part of the bound
    int depth = 0;
    std::uint64_t creation_index = 0;
    bool refined = false;
    bool sub_cell = false;

    bool splittable_on_grid() const { return !sub_cell && !box.is_cell(); }
};

struct BoundOptions {
    int group_size = 1;  // > 1 enables partition refinement of the prediction part
    std::uint64_t cell_budget = 10000;
};

/// Node over the full box region of `box`, with its lower bound filled in.
BnBNode node_from_box(const AcquisitionProblem& problem, Box box,
                      const BoundOptions& opts = {});

/// Bound decomposition b_mu + signed distance term: penalty modes add
/// kappa * (min over refs of the box-projection distance); explore mode
/// subtracts kappa * min(alpha_limit, min over refs of max_dist_to_box).
double node_lower_bound(const AcquisitionProblem& problem, const BnBNode& node,
                        const BoundOptions& opts = {});

/// Initial incumbent. Penalty modes evaluate the prediction at every reference
/// point (their own distance term is zero) and keep the best; explore mode
/// additionally tries domain corners (up to 64) and 64 seeded uniform points.
std::pair<std::vector<double>, double> warm_start(const AcquisitionProblem& problem,
                                                  std::uint64_t seed = 0);

/// Branching decision for one node.
struct BranchChoice {
    bool continuous = false;  // bisect `dim` at `point` (sub-cell refinement)
    int dim = -1;
    int edge = -1;       // grid edge index: left gets intervals [lo, edge-1]
    double point = 0.0;  // continuous split coordinate
};

/// Strong branching: scores up to `lookahead` candidate grid splits (median
/// outward per dimension, round-robin across dimensions) by the smaller child
/// bound and returns the candidate maximizing it; ties prefer the lower
/// dimension, then the lower edge index. `lookahead` < 1 picks the median edge
/// of the first splittable dimension without scoring. Single-cell explore
/// nodes bisect the longest standardized side. Throws on unsplittable nodes.
BranchChoice select_branch(const AcquisitionProblem& problem, const BnBNode& node, int lookahead);

/// Best-bound branch-and-bound to epsilon-global optimality. Deterministic for
/// a fixed config (the seed only feeds the warm start's sample points).
SolveResult solve(const AcquisitionProblem& problem, const SolverConfig& config = {});

}  // namespace treebo
