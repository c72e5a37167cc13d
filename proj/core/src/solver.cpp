#include "treebo/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

#include "treebo/rng.hpp"

namespace treebo {

void SolverConfig::validate() const {
    if (!(rel_gap > 0.0)) throw std::invalid_argument("solver config: rel_gap must be > 0");
    if (!(time_limit > 0.0)) throw std::invalid_argument("solver config: time_limit must be > 0");
    if (max_nodes == 0) throw std::invalid_argument("solver config: max_nodes must be > 0");
}

std::string to_string(Termination t) {
    switch (t) {
        case Termination::Gap: return "gap";
        case Termination::Time: return "time";
        case Termination::NodeLimit: return "node-limit";
    }
    return "?";
}

namespace {

double ensemble_min_bound(const TreeEnsemble& ensemble, std::span<const double> lower,
                          std::span<const double> upper) {
    double sum = ensemble.base_offset;
    for (const Tree& tree : ensemble.trees) sum += tree_min_over_box(tree, lower, upper);
    return sum;
}

struct AlphaInfo {
    double term = 0.0;           // signed, kappa-scaled contribution to the bound
    std::size_t nearest_ref = 0;  // penalty modes: argmin reference
};

AlphaInfo region_alpha(const AcquisitionProblem& p, std::span<const double> lower,
                       std::span<const double> upper) {
    AlphaInfo info;
    if (p.kappa == 0.0) return info;
    if (is_penalty(p.mode)) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < p.refs.size(); ++k) {
            const double d = min_dist_to_box(p.refs.point(k), lower, upper, p.standardizer,
                                             p.metric);
            if (d < best) {
                best = d;
                info.nearest_ref = k;
            }
        }
        info.term = p.kappa * best;
    } else {
        double reach = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < p.refs.size(); ++k)
            reach = std::min(reach, max_dist_to_box(p.refs.point(k), lower, upper,
                                                    p.standardizer, p.metric));
        info.term = -p.kappa * std::min(p.alpha_limit, reach);
    }
    return info;
}

double region_bound_cheap(const AcquisitionProblem& p, std::span<const double> lower,
                          std::span<const double> upper) {
    return ensemble_min_bound(p.ensemble, lower, upper) + region_alpha(p, lower, upper).term;
}

std::vector<double> midpoint(std::span<const double> lower, std::span<const double> upper) {
    std::vector<double> m(lower.size());
    for (std::size_t i = 0; i < lower.size(); ++i) m[i] = 0.5 * (lower[i] + upper[i]);
    return m;
}

// Cells are half-open on the left: a projection landing exactly on an interior
// lower edge belongs to the neighbouring cell, so it is nudged one ulp inside.
void nudge_into_cell(std::vector<double>& x, const BnBNode& node) {
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] <= node.lower[i] && node.box.lo[i] > 0)
            x[i] = std::nextafter(node.lower[i], std::numeric_limits<double>::infinity());
}

}  // namespace

double node_lower_bound(const AcquisitionProblem& problem, const BnBNode& node,
                        const BoundOptions& opts) {
    double b_mu;
    if (opts.group_size > 1 && node.splittable_on_grid() && problem.ensemble.trees.size() > 1) {
        const int group = std::min<int>(opts.group_size,
                                        static_cast<int>(problem.ensemble.trees.size()));
        b_mu = partition_refine_bound(problem.ensemble, node.box, problem.grid, group,
                                      opts.cell_budget);
    } else {
        b_mu = ensemble_min_bound(problem.ensemble, node.lower, node.upper);
    }
    return b_mu + region_alpha(problem, node.lower, node.upper).term;
}

BnBNode node_from_box(const AcquisitionProblem& problem, Box box, const BoundOptions& opts) {
    BnBNode node;
    node.box = std::move(box);
    box_bounds(problem.grid, node.box, node.lower, node.upper);
    node.alpha_term = region_alpha(problem, node.lower, node.upper).term;
    node.lower_bound = node_lower_bound(problem, node, opts);
    return node;
}

std::pair<std::vector<double>, double> warm_start(const AcquisitionProblem& problem,
                                                  std::uint64_t seed) {
    problem.validate();
    const int n = problem.grid.num_dims();
    const auto lower = problem.grid.lower_bounds();
    const auto upper = problem.grid.upper_bounds();

    auto clamped_ref = [&](std::size_t k) {
        std::vector<double> x = problem.standardizer.destandardize(problem.refs.point(k));
        for (int i = 0; i < n; ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);
        return x;
    };

    if (is_penalty(problem.mode)) {
        std::vector<double> best_x = clamped_ref(0);
        double best = predict(problem.ensemble, best_x);
        for (std::size_t k = 1; k < problem.refs.size(); ++k) {
            std::vector<double> x = clamped_ref(k);
            const double v = predict(problem.ensemble, x);
            if (v < best) {
                best = v;
                best_x = std::move(x);
            }
        }
        return {best_x, best};
    }

    std::vector<double> best_x;
    double best = std::numeric_limits<double>::infinity();
    auto consider = [&](std::vector<double> x) {
        const double v = evaluate_acquisition(problem, x);
        if (v < best) {
            best = v;
            best_x = std::move(x);
        }
    };
    for (std::size_t k = 0; k < problem.refs.size(); ++k) consider(clamped_ref(k));

    Rng rng = make_rng(seed);
    constexpr int kMaxSamples = 64;
    if (n <= 6) {
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
            std::vector<double> x(n);
            for (int i = 0; i < n; ++i) x[i] = (mask >> i) & 1 ? upper[i] : lower[i];
            consider(std::move(x));
        }
    } else {
        for (int s = 0; s < kMaxSamples; ++s) {
            std::vector<double> x(n);
            for (int i = 0; i < n; ++i) x[i] = (rng() & 1) ? upper[i] : lower[i];
            consider(std::move(x));
        }
    }
    for (int s = 0; s < kMaxSamples; ++s) consider(sample_uniform_point(rng, lower, upper));
    return {best_x, best};
}

namespace {

// Median-outward interleaved candidate enumeration used by strong branching.
std::vector<std::pair<int, int>> branch_candidates(const BnBNode& node, int limit) {
    const int n = static_cast<int>(node.box.lo.size());
    std::vector<std::vector<int>> per_dim(n);
    std::size_t total = 0;
    for (int d = 0; d < n; ++d) {
        const int a = node.box.lo[d] + 1;
        const int b = node.box.hi[d];
        if (a > b) continue;
        auto& seq = per_dim[d];
        const int m = (a + b) / 2;
        seq.push_back(m);
        for (int k = 1; m + k <= b || m - k >= a; ++k) {
            if (m + k <= b) seq.push_back(m + k);
            if (m - k >= a) seq.push_back(m - k);
        }
        total += seq.size();
    }
    std::vector<std::pair<int, int>> out;
    out.reserve(std::min<std::size_t>(total, static_cast<std::size_t>(limit)));
    for (std::size_t round = 0; out.size() < static_cast<std::size_t>(limit); ++round) {
        bool any = false;
        for (int d = 0; d < n && out.size() < static_cast<std::size_t>(limit); ++d) {
            if (round < per_dim[d].size()) {
                out.emplace_back(d, per_dim[d][round]);
                any = true;
            }
        }
        if (!any) break;
    }
    return out;
}

}  // namespace

BranchChoice select_branch(const AcquisitionProblem& problem, const BnBNode& node, int lookahead) {
    if (!node.splittable_on_grid()) {
        if (is_penalty(problem.mode))
            throw std::logic_error("select_branch: penalty-mode cell nodes are not splittable");
        // Bisect the longest standardized side of the (sub-)cell region.
        int dim = -1;
        double longest = 0.0;
        for (std::size_t i = 0; i < node.lower.size(); ++i) {
            const double w = (node.upper[i] - node.lower[i]) / problem.standardizer.std[i];
            if (w > longest) {
                longest = w;
                dim = static_cast<int>(i);
            }
        }
        if (dim < 0) throw std::logic_error("select_branch: degenerate sub-cell region");
        BranchChoice choice;
        choice.continuous = true;
        choice.dim = dim;
        choice.point = 0.5 * (node.lower[dim] + node.upper[dim]);
        return choice;
    }

    if (lookahead < 1) {
        // First-found branching: median edge of the lowest splittable dimension.
        for (std::size_t d = 0; d < node.box.lo.size(); ++d)
            if (node.box.hi[d] > node.box.lo[d])
                return {false, static_cast<int>(d), (node.box.lo[d] + 1 + node.box.hi[d]) / 2, 0.0};
        throw std::logic_error("select_branch: node has a single cell");
    }

    const auto candidates = branch_candidates(node, lookahead);
    if (candidates.empty()) throw std::logic_error("select_branch: node has a single cell");

    std::vector<double> lower(node.lower);
    std::vector<double> upper(node.upper);
    BranchChoice best;
    double best_score = -std::numeric_limits<double>::infinity();
    for (const auto& [d, edge] : candidates) {
        const double split_value = problem.grid.edge(d, edge);
        const double saved_hi = upper[d];
        upper[d] = split_value;
        const double lb_left = region_bound_cheap(problem, lower, upper);
        upper[d] = saved_hi;
        const double saved_lo = lower[d];
        lower[d] = split_value;
        const double lb_right = region_bound_cheap(problem, lower, upper);
        lower[d] = saved_lo;

        const double score = std::min(lb_left, lb_right);
        const bool wins = score > best_score ||
                          (score == best_score &&
                           (d < best.dim || (d == best.dim && edge < best.edge)));
        if (best.dim < 0 || wins) {
            best_score = score;
            best.dim = d;
            best.edge = edge;
        }
    }
    return best;
}

SolveResult solve(const AcquisitionProblem& problem, const SolverConfig& config) {
    problem.validate();
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };

    const BoundOptions cheap{1, config.refine_cell_budget};
    const bool refine_enabled =
        config.group_size > 1 && problem.ensemble.trees.size() > 1;
    const BoundOptions refine{config.group_size, config.refine_cell_budget};

    // The incumbent value is re-evaluated through the acquisition so that
    // SolveResult's upper bound always matches evaluate_acquisition(x_next).
    std::vector<double> x_next = warm_start(problem, config.seed).first;
    double ub = evaluate_acquisition(problem, x_next);

    struct Entry {
        double lb;
        int depth;
        std::uint64_t idx;
    };
    auto worse = [](const Entry& a, const Entry& b) {
        if (a.lb != b.lb) return a.lb > b.lb;
        if (a.depth != b.depth) return a.depth > b.depth;
        return a.idx > b.idx;
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> queue(worse);
    std::vector<BnBNode> arena;
    arena.reserve(256);

    auto push_node = [&](BnBNode&& node) {
        node.creation_index = arena.size();
        queue.push({node.lower_bound, node.depth, node.creation_index});
        arena.push_back(std::move(node));
    };
    push_node(node_from_box(problem, full_box(problem.grid), cheap));

    const double inf = std::numeric_limits<double>::infinity();
    double finished_lb = inf;  // min over closed regions of their certified bound
    double final_lb = -inf;
    std::uint64_t explored = 0;
    Termination term = Termination::Gap;
    auto tolerance = [&] { return config.rel_gap * std::max(1.0, std::abs(ub)); };

    while (true) {
        if (queue.empty()) {
            final_lb = std::min(finished_lb, ub);
            term = Termination::Gap;
            break;
        }
        if (elapsed() >= config.time_limit) {
            final_lb = std::min({finished_lb, queue.top().lb, ub});
            term = Termination::Time;
            break;
        }
        if (explored >= config.max_nodes) {
            final_lb = std::min({finished_lb, queue.top().lb, ub});
            term = Termination::NodeLimit;
            break;
        }
        const Entry entry = queue.top();
        queue.pop();
        BnBNode& node = arena[entry.idx];

        const double lb_now = std::min(finished_lb, node.lower_bound);
        if (config.on_progress)
            config.on_progress({ub, std::min(lb_now, ub), explored});

        // Lazy tightening: the cheap bound did not prune this node, so recompute
        // the prediction part by partition refinement and requeue once.
        if (!node.refined && refine_enabled && node.splittable_on_grid()) {
            node.refined = true;
            const double tightened = node_lower_bound(problem, node, refine);
            if (tightened > node.lower_bound) node.lower_bound = tightened;
            queue.push({node.lower_bound, node.depth, entry.idx});
            continue;
        }

        ++explored;

        // Fathomed by bound. Best-bound order makes this node's bound the
        // global minimum, so the whole run has converged.
        if (lb_now >= ub - tolerance()) {
            final_lb = std::min(lb_now, ub);
            term = Termination::Gap;
            break;
        }

        if (is_penalty(problem.mode)) {
            const AlphaInfo alpha = region_alpha(problem, node.lower, node.upper);
            std::vector<double> xp = project_to_box(problem.refs.point(alpha.nearest_ref),
                                                    node.lower, node.upper,
                                                    problem.standardizer);
            if (!node.box.is_cell()) {
                // Feasible point heuristic before branching.
                const double v = evaluate_acquisition(problem, xp);
                if (v < ub) {
                    ub = v;
                    x_next = std::move(xp);
                }
            } else {
                // Exact cell optimum: the prediction is constant on the cell and
                // the distance infimum is attained at the projection.
                nudge_into_cell(xp, node);
                const double cell_value =
                    ensemble_min_bound(problem.ensemble, node.lower, node.upper);
                const double value = cell_value + alpha.term;
                if (value < ub) {
                    ub = value;
                    x_next = std::move(xp);
                }
                finished_lb = std::min(finished_lb, value);
                node = BnBNode{};
                continue;
            }
        } else {
            std::vector<double> center = midpoint(node.lower, node.upper);
            const double v = evaluate_acquisition(problem, center);
            if (v < ub) {
                ub = v;
                x_next = std::move(center);
            }
            if (!node.splittable_on_grid()) {
                // (Sub-)cell region: closed once its bound agrees with the
                // incumbent within the gap, otherwise bisected further.
                if (node.lower_bound >= ub - tolerance()) {
                    finished_lb = std::min(finished_lb, node.lower_bound);
                    node = BnBNode{};
                    continue;
                }
                double widest = 0.0;
                for (std::size_t i = 0; i < node.lower.size(); ++i)
                    widest = std::max(widest, (node.upper[i] - node.lower[i]) /
                                                  problem.standardizer.std[i]);
                if (widest <= 1e-14) {
                    finished_lb = std::min(finished_lb, node.lower_bound);
                    node = BnBNode{};
                    continue;
                }
            }
        }

        const BranchChoice branch = select_branch(problem, node, config.lookahead);
        BnBNode left, right;
        left.depth = right.depth = node.depth + 1;
        if (branch.continuous) {
            left.box = node.box;
            right.box = node.box;
            left.sub_cell = right.sub_cell = true;
            left.lower = node.lower;
            left.upper = node.upper;
            left.upper[branch.dim] = branch.point;
            right.lower = node.lower;
            right.upper = node.upper;
            right.lower[branch.dim] = branch.point;
        } else {
            left.box = node.box;
            left.box.hi[branch.dim] = branch.edge - 1;
            right.box = node.box;
            right.box.lo[branch.dim] = branch.edge;
            box_bounds(problem.grid, left.box, left.lower, left.upper);
            box_bounds(problem.grid, right.box, right.lower, right.upper);
        }
        for (BnBNode* child : {&left, &right}) {
            const AlphaInfo alpha = region_alpha(problem, child->lower, child->upper);
            child->alpha_term = alpha.term;
            child->lower_bound =
                std::max(node.lower_bound,
                         ensemble_min_bound(problem.ensemble, child->lower, child->upper) +
                             alpha.term);
        }
        node = BnBNode{};
        push_node(std::move(left));
        push_node(std::move(right));
    }

    SolveResult result;
    result.x_next = std::move(x_next);
    result.upper_bound = ub;
    result.lower_bound = std::min(final_lb, ub);
    result.rel_gap = std::max(0.0, (ub - result.lower_bound) / std::max(1.0, std::abs(ub)));
    result.nodes_explored = explored;
    result.wall_time = elapsed();
    result.termination = term;
    return result;
}

}  // namespace treebo
