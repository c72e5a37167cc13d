// treebo: tree-ensemble surrogate optimization from the command line.
//
// Subcommands: run (BO campaign), solve (one acquisition problem), export
// (LP-format MIP), study (model-error sweep), train, ask/tell (file-backed
// sessions), list-benchmarks. Exit codes: 0 ok, 2 usage, 3 input error,
// 4 solver limit reached (result still written).

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#ifndef _WIN32
#include <unistd.h>
#endif

#include "treebo/bo.hpp"
#include "treebo/kmeans.hpp"
#include "treebo/lp_export.hpp"
#include "treebo/model_io.hpp"
#include "treebo/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace treebo;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInput = 3;
constexpr int kExitLimit = 4;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Option bundles shared between subcommands.

struct GbrtOptions {
    GBRTParams params;
    std::string preset;

    void attach(CLI::App* cmd) {
        cmd->add_option("--trees", params.num_trees, "Number of boosting stages");
        cmd->add_option("--max-depth", params.max_depth, "Maximum tree depth");
        cmd->add_option("--max-leaves", params.max_leaves, "Maximum leaves per tree");
        cmd->add_option("--min-samples-leaf", params.min_samples_leaf,
                        "Minimum samples per leaf");
        cmd->add_option("--learning-rate", params.learning_rate, "Boosting learning rate");
        cmd->add_option("--preset", preset, "Ensemble preset: small (400x3) or large (800x2)")
            ->check(CLI::IsMember({"small", "large"}));
    }
    GBRTParams resolve() const {
        GBRTParams p = params;
        if (preset == "large") {
            p.num_trees = 800;
            p.max_depth = 2;
        }
        return p;
    }
};

struct SolverOptions {
    SolverConfig config;

    void attach(CLI::App* cmd) {
        cmd->add_option("--rel-gap", config.rel_gap, "Relative optimality gap");
        cmd->add_option("--time-limit", config.time_limit, "Solve time limit in seconds");
        cmd->add_option("--lookahead", config.lookahead,
                        "Strong-branching candidates (0 = first-found)");
        cmd->add_option("--group-size", config.group_size,
                        "Partition-refinement group size (1 = plain bound)");
        cmd->add_option("--refine-cell-budget", config.refine_cell_budget,
                        "Coarse cells per refinement group");
        cmd->add_option("--max-nodes", config.max_nodes, "Node budget");
    }
};

struct ProblemOptions {
    std::string mode = "explore";
    std::string metric = "l2";
    double kappa = 1.96;
    double zeta = 0.5;
    std::optional<double> alpha_limit_override;
    std::optional<int> clusters;
    std::vector<double> lower, upper;

    void attach(CLI::App* cmd, bool with_bounds) {
        cmd->add_option("--mode", mode, "explore | penalty | cluster-penalty");
        cmd->add_option("--metric", metric, "l2 (squared Euclidean) | l1 (Manhattan)");
        cmd->add_option("--kappa", kappa, "Exploration / penalty weight");
        cmd->add_option("--zeta", zeta, "alpha_limit = zeta * Var(y)");
        cmd->add_option("--alpha-limit", alpha_limit_override,
                        "Explicit alpha_limit (overrides --zeta)");
        cmd->add_option("--clusters", clusters, "k-means cluster count (cluster-penalty)");
        if (with_bounds) {
            cmd->add_option("--lower", lower, "Lower bounds, comma separated")
                ->delimiter(',');
            cmd->add_option("--upper", upper, "Upper bounds, comma separated")
                ->delimiter(',');
        }
    }
    BOConfig to_bo_config(const GbrtOptions& gbrt, const SolverConfig& solver,
                          std::uint64_t seed) const {
        BOConfig cfg;
        cfg.mode = mode_from_string(mode);
        cfg.metric = metric_from_string(metric);
        cfg.kappa = kappa;
        cfg.zeta = zeta;
        cfg.gbrt = gbrt.resolve();
        cfg.cluster_count = clusters;
        cfg.solver = solver;
        cfg.seed = seed;
        return cfg;
    }
};

void require_bounds(const ProblemOptions& opts, std::size_t dims) {
    if (opts.lower.size() != dims || opts.upper.size() != dims)
        throw InputError("--lower/--upper must each list " + std::to_string(dims) + " values");
    for (std::size_t i = 0; i < dims; ++i)
        if (!(opts.lower[i] < opts.upper[i]))
            throw InputError("bounds are degenerate in dimension " + std::to_string(i));
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto dash = item.find('-', 1);
        if (dash != std::string::npos) {
            const std::uint64_t a = std::stoull(item.substr(0, dash));
            const std::uint64_t b = std::stoull(item.substr(dash + 1));
            if (b < a) throw InputError("bad seed range '" + item + "'");
            for (std::uint64_t s = a; s <= b; ++s) seeds.push_back(s);
        } else if (!item.empty()) {
            seeds.push_back(std::stoull(item));
        }
    }
    if (seeds.empty()) throw InputError("no seeds given");
    return seeds;
}

json result_to_json(const SolveResult& result, bool with_timing) {
    json out;
    out["x_next"] = result.x_next;
    out["upper_bound"] = result.upper_bound;
    out["lower_bound"] = result.lower_bound;
    out["rel_gap"] = result.rel_gap;
    out["nodes"] = result.nodes_explored;
    out["termination"] = to_string(result.termination);
    if (with_timing) out["wall_time"] = result.wall_time;
    return out;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw InputError("write failed for '" + path.string() + "'");
}

// ---------------------------------------------------------------------------
// Flat TOML subset used by ask/tell session files: `key = value` lines with
// numbers, strings, booleans and numeric arrays. Comments start with '#'.

struct FlatToml {
    std::map<std::string, std::string> scalars;
    std::map<std::string, std::vector<double>> arrays;

    static FlatToml parse_file(const fs::path& path) {
        std::ifstream in(path);
        if (!in) throw InputError("cannot open '" + path.string() + "'");
        FlatToml doc;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            auto trim = [](std::string s) {
                const auto a = s.find_first_not_of(" \t\r");
                if (a == std::string::npos) return std::string();
                const auto b = s.find_last_not_of(" \t\r");
                return s.substr(a, b - a + 1);
            };
            line = trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw InputError(path.string() + ":" + std::to_string(lineno) +
                                 ": expected key = value");
            const std::string key = trim(line.substr(0, eq));
            std::string value = trim(line.substr(eq + 1));
            if (value.size() >= 2 && value.front() == '[' && value.back() == ']') {
                std::vector<double> nums;
                std::stringstream ss(value.substr(1, value.size() - 2));
                std::string item;
                while (std::getline(ss, item, ','))
                    nums.push_back(parse_double(trim(item), path.string()));
                doc.arrays[key] = std::move(nums);
            } else {
                if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
                    value = value.substr(1, value.size() - 2);
                doc.scalars[key] = value;
            }
        }
        return doc;
    }

    std::string str(const std::string& key, const std::string& fallback) const {
        const auto it = scalars.find(key);
        return it == scalars.end() ? fallback : it->second;
    }
    double num(const std::string& key, double fallback) const {
        const auto it = scalars.find(key);
        return it == scalars.end() ? fallback : parse_double(it->second, "key " + key);
    }
};

struct Session {
    fs::path dir;
    std::vector<double> lower, upper;
    std::uint64_t seed = 0;
    int init_points = 10;
    BOConfig config;

    fs::path data_path() const { return dir / "data.csv"; }

    static Session load(const fs::path& dir) {
        const fs::path spec = dir / "session.toml";
        const FlatToml doc = FlatToml::parse_file(spec);
        Session s;
        s.dir = dir;
        const auto lo = doc.arrays.find("lower");
        const auto hi = doc.arrays.find("upper");
        if (lo == doc.arrays.end() || hi == doc.arrays.end())
            throw InputError(spec.string() + ": needs 'lower' and 'upper' arrays");
        s.lower = lo->second;
        s.upper = hi->second;
        if (s.lower.size() != s.upper.size() || s.lower.empty())
            throw InputError(spec.string() + ": lower/upper must be non-empty, equal length");
        s.seed = static_cast<std::uint64_t>(doc.num("seed", 0));
        s.init_points = static_cast<int>(doc.num("init_points", 10));
        s.config.mode = mode_from_string(doc.str("mode", "explore"));
        s.config.metric = metric_from_string(doc.str("metric", "l2"));
        s.config.kappa = doc.num("kappa", 1.96);
        s.config.zeta = doc.num("zeta", 0.5);
        s.config.gbrt.num_trees = static_cast<int>(doc.num("trees", 100));
        s.config.gbrt.max_depth = static_cast<int>(doc.num("max_depth", 3));
        s.config.gbrt.max_leaves = static_cast<int>(doc.num("max_leaves", 5));
        s.config.gbrt.min_samples_leaf = static_cast<int>(doc.num("min_samples_leaf", 2));
        s.config.gbrt.learning_rate = doc.num("learning_rate", 0.1);
        if (doc.scalars.count("clusters"))
            s.config.cluster_count = static_cast<int>(doc.num("clusters", 8));
        s.config.solver.rel_gap = doc.num("rel_gap", 1e-4);
        s.config.solver.time_limit = doc.num("time_limit", 120.0);
        s.config.solver.lookahead = static_cast<int>(doc.num("lookahead", 200));
        s.config.solver.group_size = static_cast<int>(doc.num("group_size", 20));
        s.config.solver.max_nodes =
            static_cast<std::uint64_t>(doc.num("max_nodes", 1e18));
        s.config.seed = s.seed;
        return s;
    }

    std::optional<Dataset> read_data() const {
        if (!fs::exists(data_path())) return std::nullopt;
        std::ifstream probe(data_path());
        std::string line;
        int rows = 0;
        while (std::getline(probe, line))
            if (!line.empty()) ++rows;
        if (rows <= 1) return std::nullopt;  // header only
        return read_dataset_csv(data_path());
    }
};

// Appends one observation with flush + fsync so a crash between ask and tell
// cannot lose committed rows.
void append_row_durable(const fs::path& path, std::span<const double> x, double f,
                        bool write_header) {
    std::FILE* fp = std::fopen(path.string().c_str(), "ab");
    if (!fp) throw InputError("cannot open '" + path.string() + "' for append");
    std::string row;
    if (write_header) {
        for (std::size_t i = 0; i < x.size(); ++i) row += "x" + std::to_string(i) + ",";
        row += "y\n";
    }
    for (double v : x) row += format_double(v) + ",";
    row += format_double(f) + "\n";
    const bool ok = std::fwrite(row.data(), 1, row.size(), fp) == row.size() &&
                    std::fflush(fp) == 0;
#ifndef _WIN32
    if (ok) ::fsync(::fileno(fp));
#endif
    std::fclose(fp);
    if (!ok) throw InputError("append failed for '" + path.string() + "'");
}

// ---------------------------------------------------------------------------

BlackBox script_blackbox(const std::string& command) {
    return [command](std::span<const double> x) -> double {
        std::string full = command;
        for (double v : x) full += " " + format_double(v);
        std::FILE* pipe = ::popen(full.c_str(), "r");
        if (!pipe) throw std::runtime_error("cannot run script '" + command + "'");
        std::string output;
        char buf[256];
        while (std::fgets(buf, sizeof(buf), pipe)) output += buf;
        const int status = ::pclose(pipe);
        if (status != 0)
            throw std::runtime_error("script exited with status " + std::to_string(status));
        try {
            return parse_double(output.substr(0, output.find_first_of("\r\n")),
                                "script output");
        } catch (const std::exception&) {
            throw std::runtime_error("script printed unparsable value: " + output);
        }
    };
}

json config_manifest(const BOConfig& cfg, std::span<const double> lower,
                     std::span<const double> upper) {
    json out;
    out["version"] = "0.1.0";
    out["seed"] = cfg.seed;
    out["budget"] = cfg.budget;
    out["init_points"] = cfg.init_points;
    out["kappa"] = cfg.kappa;
    out["zeta"] = cfg.zeta;
    out["mode"] = to_string(cfg.mode);
    out["metric"] = to_string(cfg.metric);
    out["gbrt"] = {{"trees", cfg.gbrt.num_trees},
                   {"max_depth", cfg.gbrt.max_depth},
                   {"max_leaves", cfg.gbrt.max_leaves},
                   {"min_samples_leaf", cfg.gbrt.min_samples_leaf},
                   {"learning_rate", cfg.gbrt.learning_rate}};
    if (cfg.cluster_count) out["clusters"] = *cfg.cluster_count;
    out["solver"] = {{"rel_gap", cfg.solver.rel_gap},
                     {"time_limit", cfg.solver.time_limit},
                     {"lookahead", cfg.solver.lookahead},
                     {"group_size", cfg.solver.group_size},
                     {"max_nodes", cfg.solver.max_nodes}};
    out["lower"] = std::vector<double>(lower.begin(), lower.end());
    out["upper"] = std::vector<double>(upper.begin(), upper.end());
    return out;
}

// Builds the acquisition problem a solve/export invocation describes: dataset
// from CSV, model loaded or trained in place.
AcquisitionProblem assemble_problem(const fs::path& data_path,
                                    const std::optional<fs::path>& model_path,
                                    const ProblemOptions& popts, const GbrtOptions& gbrt,
                                    std::uint64_t seed) {
    const Dataset data = read_dataset_csv(data_path);
    require_bounds(popts, static_cast<std::size_t>(data.num_features()));

    AcquisitionProblem problem;
    problem.mode = mode_from_string(popts.mode);
    problem.metric = metric_from_string(popts.metric);
    problem.kappa = popts.kappa;
    problem.ensemble = model_path ? load_model(*model_path) : train(data, gbrt.resolve());
    if (problem.ensemble.num_features != data.num_features())
        throw InputError("model expects " + std::to_string(problem.ensemble.num_features) +
                         " features, dataset has " + std::to_string(data.num_features()));
    problem.grid = build_interval_grid(problem.ensemble, popts.lower, popts.upper);
    problem.standardizer = fit_standardizer(data);
    if (problem.mode == Mode::ClusterPenalty) {
        const int k = popts.clusters.value_or(
            std::max(1, static_cast<int>(std::lround(std::sqrt(double(data.size()))))));
        problem.refs = kmeans(ReferenceSet::from_dataset(data, problem.standardizer),
                              std::min<int>(k, static_cast<int>(data.size())), seed);
    } else {
        problem.refs = ReferenceSet::from_dataset(data, problem.standardizer);
    }
    if (problem.mode == Mode::Explore)
        problem.alpha_limit = popts.alpha_limit_override
                                  ? *popts.alpha_limit_override
                                  : alpha_limit(popts.zeta, data.targets());
    problem.big_m = is_penalty(problem.mode)
                        ? big_m(problem.grid, problem.standardizer, problem.metric)
                        : 0.0;
    problem.validate();
    return problem;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gradient-boosted-tree surrogate optimization engine"};
    app.require_subcommand(1);

    // --- run ---------------------------------------------------------------
    auto* run = app.add_subcommand("run", "Run a sequential optimization campaign");
    run->set_config("--config", "", "TOML file with these options (flags override)");
    std::string run_benchmark, run_script;
    int run_dim = 2;
    std::uint64_t run_seed = 0;
    int run_budget = 300, run_init = 50;
    fs::path run_out = "trace.csv";
    std::optional<fs::path> run_manifest;
    bool run_timing = false;
    ProblemOptions run_popts;
    GbrtOptions run_gbrt;
    SolverOptions run_solver;
    run->add_option("--benchmark", run_benchmark, "Registered benchmark name");
    run->add_option("--dim", run_dim, "Benchmark dimension");
    run->add_option("--script", run_script,
                    "External evaluator: called with coordinates, prints f(x)");
    run->add_option("--budget", run_budget, "Total evaluations");
    run->add_option("--init-points", run_init, "Random initial design size");
    run->add_option("--seed", run_seed, "Campaign seed");
    run->add_option("--out", run_out, "Trace CSV path");
    run->add_option("--manifest", run_manifest, "Run manifest JSON path");
    run->add_flag("--timing", run_timing, "Record wall time in the trace (non-reproducible)");
    run_popts.attach(run, true);
    run_gbrt.attach(run);
    run_solver.attach(run);

    // --- solve -------------------------------------------------------------
    auto* solve_cmd = app.add_subcommand("solve", "Solve one acquisition problem");
    solve_cmd->set_config("--config", "", "TOML file with these options (flags override)");
    fs::path solve_data;
    std::optional<fs::path> solve_model, solve_out;
    std::uint64_t solve_seed = 0;
    bool solve_timing = false;
    ProblemOptions solve_popts;
    GbrtOptions solve_gbrt;
    SolverOptions solve_solver;
    solve_cmd->add_option("--data", solve_data, "Dataset CSV")->required();
    solve_cmd->add_option("--model", solve_model, "Model JSON (trains in place if omitted)");
    solve_cmd->add_option("--seed", solve_seed, "Seed for clustering and warm start");
    solve_cmd->add_option("--out", solve_out, "Also write the result JSON here");
    solve_cmd->add_flag("--timing", solve_timing, "Include wall time in the JSON");
    solve_popts.attach(solve_cmd, true);
    solve_gbrt.attach(solve_cmd);
    solve_solver.attach(solve_cmd);

    // --- export ------------------------------------------------------------
    auto* export_cmd = app.add_subcommand("export", "Write the explicit MIP in LP format");
    fs::path export_data, export_lp = "problem.lp";
    std::optional<fs::path> export_model;
    std::uint64_t export_seed = 0;
    ProblemOptions export_popts;
    GbrtOptions export_gbrt;
    export_cmd->add_option("--data", export_data, "Dataset CSV")->required();
    export_cmd->add_option("--model", export_model, "Model JSON (trains in place if omitted)");
    export_cmd->add_option("--out", export_lp, "LP file path");
    export_cmd->add_option("--seed", export_seed, "Seed for clustering");
    export_popts.attach(export_cmd, true);
    export_gbrt.attach(export_cmd);

    // --- study -------------------------------------------------------------
    auto* study = app.add_subcommand("study", "Model-error sweep over kappa");
    std::string study_benchmark = "rosenbrock", study_metric = "both", study_seeds = "101-110";
    int study_dim = 2, study_ntrain = 200;
    std::vector<double> study_kappas{0.5, 1.0, 2.0, 4.0, 8.0};
    fs::path study_out = "study.csv";
    GbrtOptions study_gbrt;
    SolverOptions study_solver;
    study->add_option("--benchmark", study_benchmark, "Registered benchmark name");
    study->add_option("--dim", study_dim, "Benchmark dimension");
    study->add_option("--kappas", study_kappas, "Kappa grid")->delimiter(',');
    study->add_option("--n-train", study_ntrain, "Training points per seed");
    study->add_option("--seeds", study_seeds, "Seeds: comma list and/or a-b ranges");
    study->add_option("--metric", study_metric, "l1 | l2 | both");
    study->add_option("--out", study_out, "Study CSV path");
    study_gbrt.attach(study);
    study_solver.attach(study);

    // --- train -------------------------------------------------------------
    auto* train_cmd = app.add_subcommand("train", "Train a model and save it");
    fs::path train_data, train_out = "model.json";
    GbrtOptions train_gbrt;
    train_cmd->add_option("--data", train_data, "Dataset CSV")->required();
    train_cmd->add_option("--out", train_out, "Model JSON path");
    train_gbrt.attach(train_cmd);

    // --- ask / tell --------------------------------------------------------
    auto* ask = app.add_subcommand("ask", "Propose the next point for a session");
    fs::path ask_session;
    ask->add_option("--session", ask_session, "Session directory (holds session.toml)")
        ->required();

    auto* tell = app.add_subcommand("tell", "Report an observation to a session");
    fs::path tell_session;
    std::vector<double> tell_x;
    double tell_f = 0.0;
    tell->add_option("--session", tell_session, "Session directory")->required();
    tell->add_option("--x", tell_x, "Evaluated point, comma separated")
        ->required()
        ->delimiter(',');
    tell->add_option("--f", tell_f, "Observed value")->required();

    auto* list_cmd = app.add_subcommand("list-benchmarks", "List registered benchmarks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            BlackBox blackbox;
            std::vector<double> lower = run_popts.lower, upper = run_popts.upper;
            if (!run_benchmark.empty()) {
                const Benchmark b = make_benchmark(run_benchmark, run_dim);
                blackbox = b.evaluate;
                if (lower.empty()) lower = b.lower;
                if (upper.empty()) upper = b.upper;
            } else if (!run_script.empty()) {
                blackbox = script_blackbox(run_script);
            } else {
                throw InputError("run needs --benchmark or --script");
            }
            if (lower.size() != upper.size() || lower.empty())
                throw InputError("run needs matching --lower/--upper");
            BOConfig cfg = run_popts.to_bo_config(run_gbrt, run_solver.config, run_seed);
            cfg.budget = run_budget;
            cfg.init_points = run_init;
            cfg.validate();
            const Trace trace = run_campaign(blackbox, lower, upper, cfg);
            write_trace_csv(trace, run_out, run_timing);
            if (run_manifest)
                write_text(*run_manifest, config_manifest(cfg, lower, upper).dump(2) + "\n");
            if (trace.aborted) {
                std::cerr << "campaign aborted: " << trace.abort_reason << "\n";
                return kExitInput;
            }
            std::cout << "wrote " << run_out.string() << " (" << trace.rows.size()
                      << " rows), best " << format_double(trace.rows.back().best) << "\n";
            return kExitOk;
        }

        if (solve_cmd->parsed()) {
            const AcquisitionProblem problem = assemble_problem(
                solve_data, solve_model, solve_popts, solve_gbrt, solve_seed);
            SolverConfig scfg = solve_solver.config;
            scfg.seed = solve_seed;
            const SolveResult result = solve(problem, scfg);
            const std::string text = result_to_json(result, solve_timing).dump(2) + "\n";
            std::cout << text;
            if (solve_out) write_text(*solve_out, text);
            return result.termination == Termination::Gap ? kExitOk : kExitLimit;
        }

        if (export_cmd->parsed()) {
            const AcquisitionProblem problem = assemble_problem(
                export_data, export_model, export_popts, export_gbrt, export_seed);
            const MipExportInfo info = export_mip(problem, export_lp);
            json out;
            out["lp"] = info.lp_path.string();
            out["manifest"] = info.manifest_path.string();
            out["constraints"] = info.num_constraints;
            std::cout << out.dump(2) << "\n";
            return kExitOk;
        }

        if (study->parsed()) {
            const Benchmark b = make_benchmark(study_benchmark, study_dim);
            std::vector<Metric> metrics;
            if (study_metric == "both")
                metrics = {Metric::SquaredEuclidean, Metric::Manhattan};
            else
                metrics = {metric_from_string(study_metric)};
            const auto seeds = parse_seeds(study_seeds);
            BOConfig cfg;
            cfg.gbrt = study_gbrt.resolve();
            cfg.solver = study_solver.config;
            const auto rows = uncertainty_study(b.evaluate, b.lower, b.upper, study_kappas,
                                                study_ntrain, seeds, metrics, cfg);
            write_study_csv(rows, study_out);
            std::cout << "wrote " << study_out.string() << " (" << rows.size() << " rows)\n";
            return kExitOk;
        }

        if (train_cmd->parsed()) {
            const Dataset data = read_dataset_csv(train_data);
            const TreeEnsemble model = train(data, train_gbrt.resolve());
            save_model(model, train_out);
            std::cout << "wrote " << train_out.string() << " (" << model.trees.size()
                      << " trees)\n";
            return kExitOk;
        }

        if (ask->parsed()) {
            const Session session = Session::load(ask_session);
            const auto data = session.read_data();
            std::vector<double> x;
            if (!data || static_cast<int>(data->size()) < session.init_points) {
                // Still in the initial design: replay the seeded init stream.
                const int index = data ? static_cast<int>(data->size()) : 0;
                Rng rng = make_rng(session.seed);
                for (int i = 0; i <= index; ++i)
                    x = sample_uniform_point(rng, session.lower, session.upper);
            } else {
                x = propose(*data, session.lower, session.upper, session.config);
            }
            json out;
            out["x"] = x;
            out["observations"] = data ? data->size() : 0;
            std::cout << out.dump(2) << "\n";
            return kExitOk;
        }

        if (tell->parsed()) {
            const Session session = Session::load(tell_session);
            if (tell_x.size() != session.lower.size())
                throw InputError("tell: expected " + std::to_string(session.lower.size()) +
                                 " coordinates, got " + std::to_string(tell_x.size()));
            for (double v : tell_x)
                if (!std::isfinite(v)) throw InputError("tell: non-finite coordinate");
            if (!std::isfinite(tell_f)) throw InputError("tell: non-finite value");
            const bool fresh = !fs::exists(session.data_path());
            append_row_durable(session.data_path(), tell_x, tell_f, fresh);
            std::cout << "recorded observation " << "f=" << format_double(tell_f) << "\n";
            return kExitOk;
        }

        if (list_cmd->parsed()) {
            for (const std::string& name : benchmark_names()) {
                const Benchmark b = make_benchmark(name, name == "rosenbrock" ? 2 : 1);
                std::cout << name << "  [" << format_double(b.lower[0]) << ", "
                          << format_double(b.upper[0]) << "]^dim\n";
            }
            return kExitOk;
        }
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitUsage;
}
