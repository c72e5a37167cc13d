#include "treebo/bo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "treebo/kmeans.hpp"
#include "treebo/rng.hpp"

namespace treebo {

void BOConfig::validate() const {
    if (budget < 1) throw std::invalid_argument("bo config: budget must be >= 1");
    if (init_points < 1 || init_points >= budget)
        throw std::invalid_argument("bo config: need 1 <= init_points < budget");
    if (!(kappa >= 0.0)) throw std::invalid_argument("bo config: kappa must be >= 0");
    if (!(zeta >= 0.0)) throw std::invalid_argument("bo config: zeta must be >= 0");
    solver.validate();
}

namespace {

int default_cluster_count(std::size_t n_points) {
    const int k = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n_points))));
    return std::clamp(k, 1, static_cast<int>(n_points));
}

double standardized_manhattan(std::span<const double> a, std::span<const double> b,
                              const Standardizer& std_) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d += std::abs(a[i] - b[i]) / std_.std[i];
    return d;
}

// Nearest-to-duplicate unsampled cell midpoint within an index radius of 2,
// then a seeded random fallback.
std::vector<double> dedupe_proposal(std::vector<double> x, const Dataset& data,
                                    const AcquisitionProblem& problem, std::uint64_t seed) {
    const auto& grid = problem.grid;
    const auto& std_ = problem.standardizer;
    auto min_dist_to_data = [&](std::span<const double> p) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < data.size(); ++r)
            best = std::min(best, standardized_manhattan(p, data.row(r), std_));
        return best;
    };
    constexpr double kDupTol = 1e-9;
    if (min_dist_to_data(x) >= kDupTol) return x;

    const int n = grid.num_dims();
    std::vector<int> home(n);
    for (int i = 0; i < n; ++i) home[i] = grid.interval_of(i, x[i]);

    std::vector<double> best_mid;
    double best_d = std::numeric_limits<double>::infinity();
    std::vector<int> offs(n, -2);
    while (true) {
        std::vector<double> mid(n);
        bool valid = true;
        for (int i = 0; i < n && valid; ++i) {
            const int cell = home[i] + offs[i];
            if (cell < 0 || cell >= grid.num_intervals(i)) valid = false;
            else mid[i] = 0.5 * (grid.edge(i, cell) + grid.edge(i, cell + 1));
        }
        if (valid && min_dist_to_data(mid) >= kDupTol) {
            const double d = standardized_manhattan(mid, x, std_);
            if (d < best_d) {
                best_d = d;
                best_mid = std::move(mid);
            }
        }
        int i = 0;
        while (i < n && ++offs[i] > 2) offs[i++] = -2;
        if (i == n) break;
    }
    if (!best_mid.empty()) return best_mid;

    Rng rng = make_rng(seed ^ 0x9e3779b97f4a7c15ULL);
    const auto lower = grid.lower_bounds();
    const auto upper = grid.upper_bounds();
    for (int tries = 0; tries < 1000; ++tries) {
        auto p = sample_uniform_point(rng, lower, upper);
        if (min_dist_to_data(p) >= kDupTol) return p;
    }
    return x;  // saturated domain; accept the duplicate
}

}  // namespace

AcquisitionProblem build_problem(const Dataset& data, std::span<const double> lower,
                                 std::span<const double> upper, const BOConfig& config) {
    AcquisitionProblem problem;
    problem.mode = config.mode;
    problem.metric = config.metric;
    problem.kappa = config.kappa;
    problem.ensemble = train(data, config.gbrt);
    problem.grid = build_interval_grid(problem.ensemble, lower, upper);
    problem.standardizer = fit_standardizer(data);
    if (config.mode == Mode::ClusterPenalty) {
        const int k = config.cluster_count.value_or(default_cluster_count(data.size()));
        problem.refs = kmeans(ReferenceSet::from_dataset(data, problem.standardizer), k,
                              config.seed);
    } else {
        problem.refs = ReferenceSet::from_dataset(data, problem.standardizer);
    }
    problem.alpha_limit =
        config.mode == Mode::Explore ? alpha_limit(config.zeta, data.targets()) : 0.0;
    problem.big_m = is_penalty(config.mode)
                        ? big_m(problem.grid, problem.standardizer, problem.metric)
                        : 0.0;
    problem.validate();
    return problem;
}

std::vector<double> propose(const Dataset& data, std::span<const double> lower,
                            std::span<const double> upper, const BOConfig& config) {
    if (data.size() == 0) throw std::invalid_argument("propose: empty dataset");
    const AcquisitionProblem problem = build_problem(data, lower, upper, config);
    SolverConfig solver_config = config.solver;
    solver_config.seed = config.seed;
    SolveResult result = solve(problem, solver_config);
    return dedupe_proposal(std::move(result.x_next), data, problem, config.seed);
}

Trace run_campaign(const BlackBox& blackbox, std::span<const double> lower,
                   std::span<const double> upper, const BOConfig& config) {
    config.validate();
    if (lower.size() != upper.size() || lower.empty())
        throw std::invalid_argument("run_campaign: bad bounds");
    for (std::size_t i = 0; i < lower.size(); ++i)
        if (!(lower[i] < upper[i]))
            throw std::invalid_argument("run_campaign: degenerate bounds in dim " +
                                        std::to_string(i));

    Trace trace;
    Dataset data;
    double best = std::numeric_limits<double>::infinity();
    Rng init_stream = make_rng(config.seed);

    auto record = [&](int iter, bool init, std::vector<double> x, const SolveResult* sr,
                      double solve_seconds) -> bool {
        double f;
        try {
            f = blackbox(x);
            if (!std::isfinite(f)) throw std::runtime_error("black box returned a non-finite value");
        } catch (const std::exception& e) {
            trace.aborted = true;
            trace.abort_reason = e.what();
            return false;
        }
        if (iter == 0)
            data = Dataset(static_cast<int>(x.size()), std::vector<double>(x.begin(), x.end()),
                           {f});
        else
            data.append(x, f);
        best = std::min(best, f);
        TraceRow row;
        row.iter = iter;
        row.init_phase = init;
        row.x = std::move(x);
        row.f = f;
        row.best = best;
        if (sr) {
            row.ub = sr->upper_bound;
            row.lb = sr->lower_bound;
            row.gap = sr->rel_gap;
            row.nodes = static_cast<long long>(sr->nodes_explored);
            row.seconds = solve_seconds;
        }
        trace.rows.push_back(std::move(row));
        return true;
    };

    for (int iter = 0; iter < config.init_points; ++iter)
        if (!record(iter, true, sample_uniform_point(init_stream, lower, upper), nullptr, 0.0))
            return trace;

    for (int iter = config.init_points; iter < config.budget; ++iter) {
        const auto t0 = std::chrono::steady_clock::now();
        const AcquisitionProblem problem = build_problem(data, lower, upper, config);
        SolverConfig solver_config = config.solver;
        solver_config.seed = config.seed;
        SolveResult result = solve(problem, solver_config);
        std::vector<double> x = dedupe_proposal(std::move(result.x_next), data, problem,
                                                config.seed + static_cast<std::uint64_t>(iter));
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!record(iter, false, std::move(x), &result, seconds)) return trace;
    }
    return trace;
}

std::pair<std::vector<double>, double> random_acq_optimize(const AcquisitionProblem& problem,
                                                           int n_samples, std::uint64_t seed) {
    if (n_samples < 1) throw std::invalid_argument("random_acq_optimize: n_samples must be >= 1");
    Rng rng = make_rng(seed);
    const auto lower = problem.grid.lower_bounds();
    const auto upper = problem.grid.upper_bounds();
    std::vector<double> best_x;
    double best = std::numeric_limits<double>::infinity();
    for (int s = 0; s < n_samples; ++s) {
        auto x = sample_uniform_point(rng, lower, upper);
        const double v = evaluate_acquisition(problem, x);
        if (v < best) {
            best = v;
            best_x = std::move(x);
        }
    }
    return {best_x, best};
}

Trace random_search(const Benchmark& benchmark, int budget, std::uint64_t seed) {
    if (budget < 1) throw std::invalid_argument("random_search: budget must be >= 1");
    Trace trace;
    Rng rng = make_rng(seed);
    double best = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < budget; ++iter) {
        auto x = sample_uniform_point(rng, benchmark.lower, benchmark.upper);
        const double f = benchmark.evaluate(x);
        best = std::min(best, f);
        TraceRow row;
        row.iter = iter;
        row.init_phase = true;
        row.x = std::move(x);
        row.f = f;
        row.best = best;
        trace.rows.push_back(std::move(row));
    }
    return trace;
}

double relative_model_error(double mu, double f) { return std::abs((mu - f) / mu); }

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw std::invalid_argument("quantile of an empty sample");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const std::size_t i = static_cast<std::size_t>(pos);
    if (i + 1 >= values.size()) return values.back();
    const double frac = pos - static_cast<double>(i);
    return values[i] + frac * (values[i + 1] - values[i]);
}

std::vector<StudyRow> uncertainty_study(const BlackBox& blackbox, std::span<const double> lower,
                                        std::span<const double> upper,
                                        std::vector<double> kappa_grid, int n_train,
                                        std::span<const std::uint64_t> seeds,
                                        std::span<const Metric> metrics, const BOConfig& config) {
    if (kappa_grid.empty()) throw std::invalid_argument("uncertainty_study: empty kappa grid");
    if (n_train < 1) throw std::invalid_argument("uncertainty_study: n_train must be >= 1");
    std::sort(kappa_grid.begin(), kappa_grid.end());

    std::vector<StudyRow> rows;
    for (const Metric metric : metrics) {
        // (kappa index -> per-seed values)
        std::vector<std::vector<double>> eps(kappa_grid.size());
        std::vector<std::vector<double>> mu(kappa_grid.size());
        std::vector<int> excluded(kappa_grid.size(), 0);

        for (const std::uint64_t seed : seeds) {
            Rng rng = make_rng(seed);
            Dataset data;
            for (int r = 0; r < n_train; ++r) {
                auto x = sample_uniform_point(rng, lower, upper);
                const double f = blackbox(x);
                if (!std::isfinite(f))
                    throw std::runtime_error("uncertainty_study: non-finite black-box value");
                if (r == 0)
                    data = Dataset(static_cast<int>(x.size()),
                                   std::vector<double>(x.begin(), x.end()), {f});
                else
                    data.append(x, f);
            }

            BOConfig cfg = config;
            cfg.mode = Mode::Penalty;
            cfg.metric = metric;
            cfg.seed = seed;
            for (std::size_t k = 0; k < kappa_grid.size(); ++k) {
                cfg.kappa = kappa_grid[k];
                AcquisitionProblem problem = build_problem(data, lower, upper, cfg);
                SolverConfig solver_config = cfg.solver;
                solver_config.seed = seed;
                const SolveResult result = solve(problem, solver_config);
                const double mu_hat = predict(problem.ensemble, result.x_next);
                const double f = blackbox(result.x_next);
                mu[k].push_back(mu_hat);
                if (mu_hat == 0.0)
                    ++excluded[k];
                else
                    eps[k].push_back(relative_model_error(mu_hat, f));
            }
        }

        for (std::size_t k = 0; k < kappa_grid.size(); ++k) {
            StudyRow row;
            row.metric = metric;
            row.kappa = kappa_grid[k];
            row.n_seeds = static_cast<int>(seeds.size());
            row.n_excluded = excluded[k];
            if (!eps[k].empty()) {
                row.median_eps = quantile(eps[k], 0.5);
                row.q1_eps = quantile(eps[k], 0.25);
                row.q3_eps = quantile(eps[k], 0.75);
                const double lo = quantile(eps[k], 0.0);
                const double hi = quantile(eps[k], 1.0);
                row.band_lo_eps = lo + 0.25 * (hi - lo);
                row.band_hi_eps = hi - 0.25 * (hi - lo);
            }
            row.median_mu = quantile(mu[k], 0.5);
            row.q1_mu = quantile(mu[k], 0.25);
            row.q3_mu = quantile(mu[k], 0.75);
            rows.push_back(row);
        }
    }
    return rows;
}

namespace {

std::string csv_field(double v) {
    return std::isfinite(v) ? format_double(v) : std::string();
}

}  // namespace

void write_trace_csv(const Trace& trace, const std::filesystem::path& path, bool with_timing) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write trace file '" + path.string() + "'");
    const std::size_t n = trace.rows.empty() ? 0 : trace.rows.front().x.size();
    out << "iter,phase";
    for (std::size_t i = 0; i < n; ++i) out << ",x_" << i;
    out << ",f,best,ub,lb,gap,nodes,seconds\n";
    for (const TraceRow& row : trace.rows) {
        out << row.iter << "," << (row.init_phase ? "init" : "optimize");
        for (double v : row.x) out << "," << format_double(v);
        out << "," << format_double(row.f) << "," << format_double(row.best);
        out << "," << csv_field(row.ub) << "," << csv_field(row.lb) << "," << csv_field(row.gap);
        out << ",";
        if (row.nodes >= 0) out << row.nodes;
        out << "," << format_double(with_timing ? row.seconds : 0.0) << "\n";
    }
    if (trace.aborted) out << "# aborted: " << trace.abort_reason << "\n";
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

void write_study_csv(const std::vector<StudyRow>& rows, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write study file '" + path.string() + "'");
    out << "metric,kappa,n_seeds,n_excluded,median_eps,q1_eps,q3_eps,band_lo_eps,band_hi_eps,"
           "median_mu,q1_mu,q3_mu\n";
    for (const StudyRow& r : rows) {
        out << to_string(r.metric) << "," << format_double(r.kappa) << "," << r.n_seeds << ","
            << r.n_excluded << "," << format_double(r.median_eps) << ","
            << format_double(r.q1_eps) << "," << format_double(r.q3_eps) << ","
            << format_double(r.band_lo_eps) << "," << format_double(r.band_hi_eps) << ","
            << format_double(r.median_mu) << "," << format_double(r.q1_mu) << ","
            << format_double(r.q3_mu) << "\n";
    }
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace treebo
