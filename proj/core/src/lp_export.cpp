#include "treebo/lp_export.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "treebo/dataset.hpp"

namespace treebo {

namespace {

// One linear expression: signed terms plus an optional quadratic block.
class Row {
public:
    void add(double coeff, const std::string& var) {
        if (coeff != 0.0) terms_.emplace_back(coeff, var);
    }
    void add_sq(double coeff, const std::string& var) {
        if (coeff != 0.0) quad_.emplace_back(coeff, var);
    }

    std::string render() const {
        std::string out;
        bool first = true;
        for (const auto& [c, v] : terms_) {
            append_term(out, c, v, first);
            first = false;
        }
        if (!quad_.empty()) {
            out += first ? "[ " : " + [ ";
            bool qfirst = true;
            for (const auto& [c, v] : quad_) {
                append_term(out, c, v + " ^ 2", qfirst);
                qfirst = false;
            }
            out += " ]";
        } else if (first) {
            out += "0";
        }
        return out;
    }

private:
    static void append_term(std::string& out, double c, const std::string& v, bool first) {
        const double a = std::abs(c);
        if (first) {
            if (c < 0) out += "- ";
        } else {
            out += c < 0 ? " - " : " + ";
        }
        if (a != 1.0) {
            out += format_double(a);
            out += " ";
        }
        out += v;
    }

    std::vector<std::pair<double, std::string>> terms_;
    std::vector<std::pair<double, std::string>> quad_;
};

// LP readers cap physical line length; wrap on term boundaries.
void emit_wrapped(std::ostream& os, const std::string& head, const std::string& body) {
    std::string line = " " + head + " " + body;
    constexpr std::size_t kMaxLine = 200;
    while (line.size() > kMaxLine) {
        std::size_t cut = line.rfind(' ', kMaxLine);
        if (cut == std::string::npos || cut < 2) break;
        os << line.substr(0, cut) << "\n";
        line = "   " + line.substr(cut + 1);
    }
    os << line << "\n";
}

std::string yname(int i, int j) { return "y_" + std::to_string(i) + "_" + std::to_string(j); }
std::string zname(std::size_t t, int l) {
    return "z_" + std::to_string(t) + "_" + std::to_string(l);
}
std::string xname(int i) { return "x_" + std::to_string(i); }

// Leaf ordinals (position among leaves in preorder) under each subtree.
void collect_leaves(const Tree& tree, int node, const std::vector<int>& leaf_ordinal,
                    std::vector<int>& out) {
    const TreeNode& n = tree.nodes[node];
    if (n.is_leaf()) {
        out.push_back(leaf_ordinal[node]);
        return;
    }
    collect_leaves(tree, n.left, leaf_ordinal, out);
    collect_leaves(tree, n.right, leaf_ordinal, out);
}

}  // namespace

MipExportInfo export_mip(const AcquisitionProblem& problem, const std::filesystem::path& lp_path) {
    problem.validate();
    const int n = problem.grid.num_dims();
    const IntervalGrid& grid = problem.grid;
    const Standardizer& std_ = problem.standardizer;
    const bool penalty = is_penalty(problem.mode);
    const bool manhattan = problem.metric == Metric::Manhattan;
    const std::size_t num_refs = problem.refs.size();

    MipExportInfo info;
    info.lp_path = lp_path;
    info.manifest_path = lp_path;
    info.manifest_path += ".manifest.json";
    info.big_m = problem.big_m > 0.0 ? problem.big_m : big_m(grid, std_, problem.metric);

    std::ostringstream body;
    std::size_t rows = 0;
    auto constraint = [&](const std::string& name, const Row& row, const char* rel, double rhs) {
        emit_wrapped(body, name + ":", row.render() + " " + rel + " " + format_double(rhs));
        ++rows;
    };

    // mu = base_offset + sum F_{t,l} z_{t,l}
    std::vector<std::vector<int>> leaf_ordinals(problem.ensemble.trees.size());
    {
        Row mu_def;
        mu_def.add(1.0, "mu");
        for (std::size_t t = 0; t < problem.ensemble.trees.size(); ++t) {
            const Tree& tree = problem.ensemble.trees[t];
            auto& ordinal = leaf_ordinals[t];
            ordinal.assign(tree.nodes.size(), -1);
            int next = 0;
            for (std::size_t k = 0; k < tree.nodes.size(); ++k)
                if (tree.nodes[k].is_leaf()) ordinal[k] = next++;
            info.num_z += static_cast<std::size_t>(next);
            for (std::size_t k = 0; k < tree.nodes.size(); ++k)
                if (tree.nodes[k].is_leaf())
                    mu_def.add(-tree.nodes[k].value, zname(t, ordinal[k]));
        }
        constraint("mu_def", mu_def, "=", problem.ensemble.base_offset);
    }

    // One active leaf per tree, and split ordering along each root-leaf path.
    for (std::size_t t = 0; t < problem.ensemble.trees.size(); ++t) {
        const Tree& tree = problem.ensemble.trees[t];
        Row one;
        for (std::size_t k = 0; k < tree.nodes.size(); ++k)
            if (tree.nodes[k].is_leaf()) one.add(1.0, zname(t, leaf_ordinals[t][k]));
        constraint("leaf_sum_" + std::to_string(t), one, "=", 1.0);

        int split_id = 0;
        for (std::size_t k = 0; k < tree.nodes.size(); ++k) {
            const TreeNode& node = tree.nodes[k];
            if (node.is_leaf()) continue;
            const int i = node.feature;
            const auto& th = grid.dim(i).thresholds;
            auto it = std::lower_bound(th.begin(), th.end(), node.threshold - kThresholdTol);
            const bool on_grid = it != th.end() && *it <= node.threshold + kThresholdTol;

            std::vector<int> left, right;
            collect_leaves(tree, node.left, leaf_ordinals[t], left);
            collect_leaves(tree, node.right, leaf_ordinals[t], right);
            const std::string tag = std::to_string(t) + "_" + std::to_string(split_id++);

            Row lrow, rrow;
            for (int l : left) lrow.add(1.0, zname(t, l));
            for (int l : right) rrow.add(1.0, zname(t, l));
            if (on_grid) {
                const int j = static_cast<int>(it - th.begin()) + 1;  // 1-based interval split
                lrow.add(-1.0, yname(i, j));
                constraint("split_left_" + tag, lrow, "<=", 0.0);
                rrow.add(1.0, yname(i, j));
                constraint("split_right_" + tag, rrow, "<=", 1.0);
            } else if (node.threshold <= grid.dim(i).lower + kThresholdTol) {
                // Split below the domain: the left branch is unreachable.
                constraint("split_left_" + tag, lrow, "<=", 0.0);
            } else {
                constraint("split_right_" + tag, rrow, "<=", 0.0);
            }
        }
    }

    // Interval ordering and the x <-> y linking rows.
    for (int i = 0; i < n; ++i) {
        const int m = grid.num_thresholds(i);
        info.num_y += static_cast<std::size_t>(m);
        for (int j = 1; j + 1 <= m; ++j) {
            Row ord;
            ord.add(1.0, yname(i, j));
            ord.add(-1.0, yname(i, j + 1));
            constraint("order_" + std::to_string(i) + "_" + std::to_string(j), ord, "<=", 0.0);
        }
        if (m == 0) continue;
        // x_i >= v_{i,0} + sum_j (v_{i,j} - v_{i,j-1}) (1 - y_{i,j})
        Row lo;
        lo.add(1.0, xname(i));
        for (int j = 1; j <= m; ++j) lo.add(grid.edge(i, j) - grid.edge(i, j - 1), yname(i, j));
        constraint("link_lo_" + std::to_string(i), lo, ">=", grid.edge(i, m));
        // x_i <= v_{i,m+1} - sum_j (v_{i,j+1} - v_{i,j}) y_{i,j}
        Row hi;
        hi.add(1.0, xname(i));
        for (int j = 1; j <= m; ++j) hi.add(grid.edge(i, j + 1) - grid.edge(i, j), yname(i, j));
        constraint("link_hi_" + std::to_string(i), hi, "<=", grid.edge(i, m + 1));
    }
    info.num_x = static_cast<std::size_t>(n);

    // Distance structure. Standardized offset of reference d in dimension i is
    // ref_{d,i} - (x_i - mu_i) / sigma_i; a_i and c_{d,i} fold the standardizer
    // into plain linear coefficients.
    std::vector<std::string> sos_lines;
    for (std::size_t d = 0; d < num_refs; ++d) {
        auto ref = problem.refs.point(d);
        const std::string ds = std::to_string(d);
        if (manhattan) {
            for (int i = 0; i < n; ++i) {
                Row link;
                link.add(1.0 / std_.std[i], xname(i));
                link.add(1.0, "rp_" + ds + "_" + std::to_string(i));
                link.add(-1.0, "rm_" + ds + "_" + std::to_string(i));
                constraint("man_link_" + ds + "_" + std::to_string(i), link, "=",
                           ref[i] + std_.mean[i] / std_.std[i]);
                sos_lines.push_back(" sos_" + ds + "_" + std::to_string(i) + ": S1:: rp_" + ds +
                                    "_" + std::to_string(i) + ":1 rm_" + ds + "_" +
                                    std::to_string(i) + ":2");
            }
            info.num_r += 2 * static_cast<std::size_t>(n);
            info.num_sos += static_cast<std::size_t>(n);
            Row sum;
            for (int i = 0; i < n; ++i) {
                sum.add(1.0, "rp_" + ds + "_" + std::to_string(i));
                sum.add(1.0, "rm_" + ds + "_" + std::to_string(i));
            }
            if (penalty) {
                // sum_i (r+ + r-) <= alpha + M (1 - b_d)
                sum.add(-1.0, "alpha");
                sum.add(info.big_m, "b_" + ds);
                constraint("bigm_" + ds, sum, "<=", info.big_m);
            } else {
                Row dist;
                dist.add(1.0, "dist_" + ds);
                for (int i = 0; i < n; ++i) {
                    dist.add(-1.0, "rp_" + ds + "_" + std::to_string(i));
                    dist.add(-1.0, "rm_" + ds + "_" + std::to_string(i));
                }
                constraint("dist_def_" + ds, dist, "<=", 0.0);
                ++info.num_dist;
            }
        } else {
            // (a_i x_i - c_{d,i})^2 summed over i.
            double c_sq = 0.0;
            Row quad;
            for (int i = 0; i < n; ++i) {
                const double a = 1.0 / std_.std[i];
                const double c = ref[i] + std_.mean[i] / std_.std[i];
                quad.add_sq(penalty ? a * a : -a * a, xname(i));
                quad.add(penalty ? -2.0 * a * c : 2.0 * a * c, xname(i));
                c_sq += c * c;
            }
            if (penalty) {
                quad.add(-1.0, "alpha");
                quad.add(info.big_m, "b_" + ds);
                constraint("bigm_" + ds, quad, "<=", info.big_m - c_sq);
            } else {
                quad.add(1.0, "dist_" + ds);
                constraint("dist_def_" + ds, quad, "<=", c_sq);
                ++info.num_dist;
            }
        }
        if (!penalty) {
            Row le;
            le.add(1.0, "alpha");
            le.add(-1.0, "dist_" + ds);
            constraint("alpha_le_" + ds, le, "<=", 0.0);
        }
    }
    if (penalty) {
        Row pick;
        for (std::size_t d = 0; d < num_refs; ++d) pick.add(1.0, "b_" + std::to_string(d));
        constraint("pick_one", pick, "=", 1.0);
        info.num_b = num_refs;
    }
    info.num_constraints = rows;

    std::ofstream out(lp_path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write LP file '" + lp_path.string() + "'");
    out << "\\ " << to_string(problem.mode) << " acquisition, " << to_string(problem.metric)
        << " uncertainty, kappa = " << format_double(problem.kappa) << "\n";
    out << "Minimize\n";
    {
        Row obj;
        obj.add(1.0, "mu");
        obj.add(penalty ? problem.kappa : -problem.kappa, "alpha");
        emit_wrapped(out, "obj:", obj.render());
    }
    out << "Subject To\n" << body.str();
    out << "Bounds\n";
    for (int i = 0; i < n; ++i)
        out << " " << format_double(grid.dim(i).lower) << " <= " << xname(i)
            << " <= " << format_double(grid.dim(i).upper) << "\n";
    out << " mu free\n";
    if (!penalty)
        out << " 0 <= alpha <= " << format_double(problem.alpha_limit) << "\n";
    out << "Binaries\n";
    {
        std::string line;
        auto push_binary = [&](const std::string& name) {
            if (line.size() + name.size() + 1 > 200) {
                out << " " << line << "\n";
                line.clear();
            }
            if (!line.empty()) line += " ";
            line += name;
        };
        for (int i = 0; i < n; ++i)
            for (int j = 1; j <= grid.num_thresholds(i); ++j) push_binary(yname(i, j));
        for (std::size_t d = 0; d < info.num_b; ++d) push_binary("b_" + std::to_string(d));
        if (!line.empty()) out << " " << line << "\n";
    }
    if (!sos_lines.empty()) {
        out << "SOS\n";
        for (const auto& s : sos_lines) out << s << "\n";
    }
    out << "End\n";
    if (!out) throw std::runtime_error("write failed for '" + lp_path.string() + "'");

    nlohmann::json manifest;
    manifest["mode"] = to_string(problem.mode);
    manifest["metric"] = to_string(problem.metric);
    manifest["kappa"] = problem.kappa;
    manifest["alpha_limit"] = penalty ? nlohmann::json() : nlohmann::json(problem.alpha_limit);
    manifest["M"] = penalty ? nlohmann::json(info.big_m) : nlohmann::json();
    manifest["counts"] = {
        {"x", info.num_x},       {"y", info.num_y},   {"z", info.num_z},
        {"b", info.num_b},       {"r", info.num_r},   {"dist", info.num_dist},
        {"sos", info.num_sos},   {"constraints", info.num_constraints},
    };
    std::ofstream mout(info.manifest_path, std::ios::trunc);
    if (!mout)
        throw std::runtime_error("cannot write manifest '" + info.manifest_path.string() + "'");
    mout << manifest.dump(2) << "\n";
    return info;
}

}  // namespace treebo
