#include <benchmark/benchmark.h>

#include "support/instances.hpp"
#include "treebo/bo.hpp"

using namespace treebo;
using namespace treebo::testing;

namespace {

TreeEnsemble bench_model(int trees, int dims, std::vector<double>& lo, std::vector<double>& hi) {
    Rng rng = make_rng(1);
    lo.assign(dims, -4.0);
    hi.assign(dims, 4.0);
    const Dataset data = random_dataset(rng, dims, 300, lo, hi);
    GBRTParams params;
    params.num_trees = trees;
    params.max_depth = 3;
    params.max_leaves = 5;
    params.min_samples_leaf = 10;
    return train(data, params);
}

void BM_predict(benchmark::State& state) {
    std::vector<double> lo, hi;
    const TreeEnsemble model = bench_model(static_cast<int>(state.range(0)), 8, lo, hi);
    Rng rng = make_rng(7);
    const auto x = sample_uniform_point(rng, lo, hi);
    for (auto _ : state) benchmark::DoNotOptimize(predict(model, x));
}
BENCHMARK(BM_predict)->Arg(100)->Arg(400)->Arg(800);

void BM_min_prediction_bound(benchmark::State& state) {
    std::vector<double> lo, hi;
    const TreeEnsemble model = bench_model(static_cast<int>(state.range(0)), 8, lo, hi);
    const IntervalGrid grid = build_interval_grid(model, lo, hi);
    const Box box = full_box(grid);
    for (auto _ : state) benchmark::DoNotOptimize(min_prediction_bound(model, box, grid));
}
BENCHMARK(BM_min_prediction_bound)->Arg(100)->Arg(400);

void BM_partition_refine_bound(benchmark::State& state) {
    std::vector<double> lo, hi;
    const TreeEnsemble model = bench_model(200, 8, lo, hi);
    const IntervalGrid grid = build_interval_grid(model, lo, hi);
    const Box box = full_box(grid);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            partition_refine_bound(model, box, grid, 20, static_cast<std::uint64_t>(state.range(0))));
}
BENCHMARK(BM_partition_refine_bound)->Arg(500)->Arg(2000)->Arg(10000);

void BM_solve_penalty(benchmark::State& state) {
    InstanceSpec spec;
    spec.dims = 2;
    spec.mode = Mode::Penalty;
    spec.kappa = 1.0;
    const AcquisitionProblem p = make_instance(11, spec);
    SolverConfig cfg;
    cfg.rel_gap = 1e-6;
    for (auto _ : state) benchmark::DoNotOptimize(solve(p, cfg));
}
BENCHMARK(BM_solve_penalty);

void BM_kmeans(benchmark::State& state) {
    Rng rng = make_rng(3);
    std::vector<double> flat;
    for (int i = 0; i < 2000 * 8; ++i) flat.push_back(uniform01(rng));
    const ReferenceSet pts(ReferenceSet::Kind::Data, 8, std::move(flat));
    for (auto _ : state)
        benchmark::DoNotOptimize(kmeans(pts, static_cast<int>(state.range(0)), 1));
}
BENCHMARK(BM_kmeans)->Arg(10)->Arg(50);

}  // namespace

BENCHMARK_MAIN();
