#pragma once

#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "treebo/blackbox.hpp"
#include "treebo/solver.hpp"
#include "treebo/train.hpp"

namespace treebo {

struct BOConfig {
    int budget = 300;
    int init_points = 50;
    double kappa = 1.96;
    double zeta = 0.5;
    Mode mode = Mode::Explore;
    Metric metric = Metric::SquaredEuclidean;
    GBRTParams gbrt;  // "large" preset swaps in 800 trees of depth 2
    std::optional<int> cluster_count;  // cluster-penalty mode; default ~ sqrt(|D|)
    SolverConfig solver;
    std::uint64_t seed = 0;

    void validate() const;
};

struct TraceRow {
    int iter = 0;
    bool init_phase = false;
    std::vector<double> x;
    double f = 0.0;
    double best = 0.0;
    // Solver fields; NaN / -1 on init rows (written as empty CSV fields).
    double ub = std::numeric_limits<double>::quiet_NaN();
    double lb = std::numeric_limits<double>::quiet_NaN();
    double gap = std::numeric_limits<double>::quiet_NaN();
    long long nodes = -1;
    double seconds = 0.0;
};

struct Trace {
    std::vector<TraceRow> rows;
    bool aborted = false;
    std::string abort_reason;
};

using BlackBox = std::function<double(std::span<const double>)>;

/// Everything propose() assembles on the way to x_next; exposed so the CLI
/// and the exporter can reuse one construction path.
AcquisitionProblem build_problem(const Dataset& data, std::span<const double> lower,
                                 std::span<const double> upper, const BOConfig& config);

/// One BO step: train on the data, build the acquisition problem, solve it.
/// Proposals that collide with an existing point (standardized Manhattan
/// distance < 1e-9) are moved to a nearby unsampled cell midpoint, falling
/// back to a seeded random point. Deterministic given data and seed.
std::vector<double> propose(const Dataset& data, std::span<const double> lower,
                            std::span<const double> upper, const BOConfig& config);

/// Sequential campaign: seeded uniform init phase, then propose/evaluate
/// until the budget is spent. A black-box failure aborts with the partial
/// trace flagged.
Trace run_campaign(const BlackBox& blackbox, std::span<const double> lower,
                   std::span<const double> upper, const BOConfig& config);

/// Random-sampling acquisition baseline: best of n seeded uniform points.
std::pair<std::vector<double>, double> random_acq_optimize(const AcquisitionProblem& problem,
                                                           int n_samples, std::uint64_t seed);

/// Pure random search over the domain, sharing propose()'s init stream: with
/// equal seeds its first rows coincide with a campaign's init phase.
Trace random_search(const Benchmark& benchmark, int budget, std::uint64_t seed);

/// One row of the model-error study per (metric, kappa): medians and quartiles
/// of the relative model error and of the model prediction at the penalty-mode
/// optimum, across seeds. Rows with a zero model prediction are excluded from
/// the error statistics and counted.
struct StudyRow {
    Metric metric = Metric::SquaredEuclidean;
    double kappa = 0.0;
    int n_seeds = 0;
    int n_excluded = 0;
    double median_eps = 0.0, q1_eps = 0.0, q3_eps = 0.0;
    // Quartile thresholds the min-max-range-over-four convention produces.
    double band_lo_eps = 0.0, band_hi_eps = 0.0;
    double median_mu = 0.0, q1_mu = 0.0, q3_mu = 0.0;
};

std::vector<StudyRow> uncertainty_study(const BlackBox& blackbox, std::span<const double> lower,
                                        std::span<const double> upper,
                                        std::vector<double> kappa_grid, int n_train,
                                        std::span<const std::uint64_t> seeds,
                                        std::span<const Metric> metrics, const BOConfig& config);

/// Relative model error |(mu - f) / mu|.
double relative_model_error(double mu, double f);

/// Trace CSV: iter, phase, x_0..x_{n-1}, f, best, ub, lb, gap, nodes, seconds.
/// Timing is volatile, so the seconds column is zeroed unless requested; all
/// other fields are deterministic and reruns produce byte-identical files.
void write_trace_csv(const Trace& trace, const std::filesystem::path& path,
                     bool with_timing = false);

void write_study_csv(const std::vector<StudyRow>& rows, const std::filesystem::path& path);

/// Linear-interpolation quantile of a sample (0 <= q <= 1).
double quantile(std::vector<double> values, double q);

}  // namespace treebo
