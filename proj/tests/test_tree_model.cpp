#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "support/instances.hpp"
#include "treebo/bounds.hpp"
#include "treebo/model_io.hpp"
#include "treebo/rng.hpp"
#include "treebo/train.hpp"

using namespace treebo;
using namespace treebo::testing;

namespace {

Dataset dataset_1d(std::vector<double> x, std::vector<double> y) {
    return Dataset(1, std::move(x), std::move(y));
}

GBRTParams small_params(int trees, int depth, int leaves = 5) {
    GBRTParams p;
    p.num_trees = trees;
    p.max_depth = depth;
    p.max_leaves = leaves;
    p.min_samples_leaf = 1;
    p.learning_rate = 1.0;
    return p;
}

}  // namespace

TEST_CASE("train: constant targets produce the constant model") {
    Dataset data = dataset_1d({0.0, 0.25, 0.5, 0.75, 1.0}, {3.0, 3.0, 3.0, 3.0, 3.0});
    const TreeEnsemble model = train(data, small_params(4, 3));
    CHECK(model.base_offset == 3.0);
    for (const Tree& t : model.trees) {
        CHECK(t.nodes.size() == 1);  // no positive-gain split exists
        CHECK(t.nodes[0].value == 0.0);
    }
    for (double x : {0.0, 0.3, 0.99}) CHECK(predict(model, std::vector{x}) == 3.0);
}

TEST_CASE("train: one boosting stage on two points reproduces the hand-run") {
    Dataset data = dataset_1d({0.0, 1.0}, {0.0, 2.0});
    const TreeEnsemble model = train(data, small_params(1, 1, 2));
    CHECK(model.base_offset == 1.0);
    REQUIRE(model.trees.size() == 1);
    REQUIRE(model.trees[0].nodes.size() == 3);
    CHECK(model.trees[0].nodes[0].threshold == 0.5);
    CHECK(predict(model, std::vector{0.2}) == 0.0);
    CHECK(predict(model, std::vector{0.8}) == 2.0);
    CHECK(predict(model, std::vector{0.5}) == 0.0);  // threshold routes left
}

TEST_CASE("train: determinism for a fixed seed") {
    Rng rng = make_rng(7);
    std::vector<double> lo{-2.0, -2.0}, hi{2.0, 2.0};
    Dataset data = random_dataset(rng, 2, 40, lo, hi);
    GBRTParams params = small_params(8, 3);
    params.seed = 42;
    CHECK(train(data, params) == train(data, params));
}

TEST_CASE("train: rejects bad inputs") {
    Dataset data = dataset_1d({0.0, 1.0}, {0.0, 2.0});
    GBRTParams p = small_params(1, 1);
    p.num_trees = 0;
    CHECK_THROWS_AS(train(data, p), std::invalid_argument);
    p = small_params(1, 1);
    p.learning_rate = 0.0;
    CHECK_THROWS_AS(train(data, p), std::invalid_argument);
    CHECK_THROWS_AS(Dataset(1, {0.0, std::nan("")}, {1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("train: RMSE is non-increasing in the boosting stage count") {
    Rng rng = make_rng(11);
    std::vector<double> lo{-3.0}, hi{3.0};
    Dataset data = random_dataset(rng, 1, 60, lo, hi);
    const TreeEnsemble model = train(data, small_params(12, 3));

    auto rmse_with_stages = [&](std::size_t stages) {
        double sse = 0.0;
        for (std::size_t r = 0; r < data.size(); ++r) {
            double pred = model.base_offset;
            for (std::size_t t = 0; t < stages; ++t) pred += model.trees[t].value_at(data.row(r));
            sse += (pred - data.target(r)) * (pred - data.target(r));
        }
        return std::sqrt(sse / static_cast<double>(data.size()));
    };
    double prev = rmse_with_stages(0);
    for (std::size_t s = 1; s <= model.trees.size(); ++s) {
        const double cur = rmse_with_stages(s);
        CHECK(cur <= prev + 1e-12);
        prev = cur;
    }
}

TEST_CASE("predict: empty ensemble returns the offset") {
    TreeEnsemble model;
    model.num_features = 2;
    model.base_offset = -1.5;
    CHECK(predict(model, std::vector{0.7, 0.1}) == -1.5);
}

TEST_CASE("predict: single split routes by <= threshold") {
    TreeEnsemble model;
    model.num_features = 1;
    model.trees.push_back(Tree{{{0, 0.5, 1, 2, 0.0}, {-1, 0, -1, -1, 1.0}, {-1, 0, -1, -1, 2.0}}});
    CHECK(predict(model, std::vector{0.3}) == 1.0);
    CHECK(predict(model, std::vector{0.5}) == 1.0);
    CHECK(predict(model, std::vector{0.51}) == 2.0);
    CHECK_THROWS_AS(predict(model, std::vector{0.3, 0.4}), std::invalid_argument);
}

TEST_CASE("predict equals per-cell evaluation at every cell midpoint") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        Rng rng = make_rng(seed);
        std::vector<double> lo{-2.0, -1.0}, hi{2.0, 3.0};
        Dataset data = random_dataset(rng, 2, 30, lo, hi);
        const TreeEnsemble model = train(data, small_params(5, 3, 4));
        const IntervalGrid grid = build_interval_grid(model, lo, hi);
        REQUIRE(grid.cell_count() <= 2000);
        for_each_cell(grid, full_box(grid), [&](const Box& cell) {
            const auto mid = cell_midpoint(grid, cell);
            double via_leaves = model.base_offset;
            for (const Tree& tree : model.trees) {
                const auto leaves = reachable_leaves(tree, cell, grid);
                REQUIRE(leaves.size() == 1);
                via_leaves += tree.nodes[leaves[0]].value;
            }
            CHECK(predict(model, mid) == doctest::Approx(via_leaves).epsilon(1e-12));
        });
    }
}

TEST_CASE("build_interval_grid: threshold collection, dedup, out-of-domain drop") {
    TreeEnsemble model;
    model.num_features = 1;
    model.trees.push_back(Tree{{{0, 0.5, 1, 2, 0.0}, {-1, 0, -1, -1, 0.0}, {-1, 0, -1, -1, 1.0}}});
    std::vector<double> lo{0.0}, hi{1.0};

    SUBCASE("single threshold") {
        const IntervalGrid grid = build_interval_grid(model, lo, hi);
        REQUIRE(grid.num_thresholds(0) == 1);
        CHECK(grid.edge(0, 0) == 0.0);
        CHECK(grid.edge(0, 1) == 0.5);
        CHECK(grid.edge(0, 2) == 1.0);
    }
    SUBCASE("duplicate thresholds collapse") {
        model.trees.push_back(model.trees[0]);
        const IntervalGrid grid = build_interval_grid(model, lo, hi);
        CHECK(grid.num_thresholds(0) == 1);
    }
    SUBCASE("out-of-domain thresholds are dropped") {
        model.trees[0].nodes[0].threshold = 1.5;
        const IntervalGrid grid = build_interval_grid(model, lo, hi);
        CHECK(grid.num_thresholds(0) == 0);
    }
    SUBCASE("degenerate bounds are rejected") {
        CHECK_THROWS_AS(build_interval_grid(model, lo, std::vector{0.0}),
                        std::invalid_argument);
    }
}

TEST_CASE("reachable_leaves: full domain, single cell, brute force") {
    Rng rng = make_rng(23);
    std::vector<double> lo{-2.0, -2.0}, hi{2.0, 2.0};
    Dataset data = random_dataset(rng, 2, 30, lo, hi);
    const TreeEnsemble model = train(data, small_params(4, 3, 4));
    const IntervalGrid grid = build_interval_grid(model, lo, hi);
    const Tree& tree = model.trees[0];

    CHECK(reachable_leaves(tree, full_box(grid), grid) == tree.leaf_nodes());

    // Random sub-boxes: the reachable set equals the union of leaves hit by
    // the midpoints of the contained cells.
    for (int rep = 0; rep < 20; ++rep) {
        Box box;
        box.lo.resize(2);
        box.hi.resize(2);
        for (int i = 0; i < 2; ++i) {
            const int a = static_cast<int>(uniform_index(rng, grid.num_intervals(i)));
            const int b = static_cast<int>(uniform_index(rng, grid.num_intervals(i)));
            box.lo[i] = std::min(a, b);
            box.hi[i] = std::max(a, b);
        }
        std::vector<int> expected;
        for_each_cell(grid, box, [&](const Box& cell) {
            expected.push_back(tree.leaf_index(cell_midpoint(grid, cell)));
        });
        std::sort(expected.begin(), expected.end());
        expected.erase(std::unique(expected.begin(), expected.end()), expected.end());
        CHECK(reachable_leaves(tree, box, grid) == expected);
        if (box.is_cell()) CHECK(expected.size() == 1);
    }
}

TEST_CASE("min_prediction_bound: exactness and validity") {
    Rng rng = make_rng(31);
    std::vector<double> lo{-1.0, -1.0}, hi{3.0, 3.0};
    Dataset data = random_dataset(rng, 2, 30, lo, hi);

    SUBCASE("single tree is exact on any box") {
        const TreeEnsemble model = train(data, small_params(1, 3));
        const IntervalGrid grid = build_interval_grid(model, lo, hi);
        const Box box = full_box(grid);
        CHECK(min_prediction_bound(model, box, grid) ==
              doctest::Approx(box_min_oracle(model, grid, box)).epsilon(1e-12));
    }
    SUBCASE("single cell equals the midpoint prediction") {
        const TreeEnsemble model = train(data, small_params(5, 3, 4));
        const IntervalGrid grid = build_interval_grid(model, lo, hi);
        for_each_cell(grid, full_box(grid), [&](const Box& cell) {
            CHECK(min_prediction_bound(model, cell, grid) ==
                  doctest::Approx(predict(model, cell_midpoint(grid, cell))).epsilon(1e-12));
        });
    }
    SUBCASE("full domain bound is below the brute-force minimum") {
        const TreeEnsemble model = train(data, small_params(6, 3, 4));
        const IntervalGrid grid = build_interval_grid(model, lo, hi);
        const Box box = full_box(grid);
        CHECK(min_prediction_bound(model, box, grid) <=
              box_min_oracle(model, grid, box) + 1e-12);
    }
}

TEST_CASE("partition_refine_bound: degenerate groupings and the sandwich") {
    Rng rng = make_rng(37);
    std::vector<double> lo{-2.0, 0.0}, hi{2.0, 4.0};
    Dataset data = random_dataset(rng, 2, 30, lo, hi);
    const TreeEnsemble model = train(data, small_params(6, 3, 4));
    const IntervalGrid grid = build_interval_grid(model, lo, hi);
    const int num_trees = static_cast<int>(model.trees.size());

    for (int rep = 0; rep < 10; ++rep) {
        Box box;
        box.lo.resize(2);
        box.hi.resize(2);
        for (int i = 0; i < 2; ++i) {
            const int a = static_cast<int>(uniform_index(rng, grid.num_intervals(i)));
            const int b = static_cast<int>(uniform_index(rng, grid.num_intervals(i)));
            box.lo[i] = std::min(a, b);
            box.hi[i] = std::max(a, b);
        }
        const double plain = min_prediction_bound(model, box, grid);
        const double exact = box_min_oracle(model, grid, box);
        CHECK(partition_refine_bound(model, box, grid, num_trees) ==
              doctest::Approx(exact).epsilon(1e-12));
        CHECK(partition_refine_bound(model, box, grid, 1) ==
              doctest::Approx(plain).epsilon(1e-12));
        if (num_trees >= 2) {
            const double grouped = partition_refine_bound(model, box, grid, 2);
            CHECK(grouped >= plain - 1e-12);
            CHECK(grouped <= exact + 1e-12);
        }
        // Budget exhaustion falls back to the plain bound.
        CHECK(partition_refine_bound(model, box, grid, num_trees, 1) ==
              doctest::Approx(plain).epsilon(1e-12));
    }
}

TEST_CASE("min_prediction_bound is monotone under box shrinking") {
    Rng rng = make_rng(41);
    std::vector<double> lo{-2.0, -2.0}, hi{2.0, 2.0};
    Dataset data = random_dataset(rng, 2, 30, lo, hi);
    const TreeEnsemble model = train(data, small_params(5, 3, 4));
    const IntervalGrid grid = build_interval_grid(model, lo, hi);
    Box outer = full_box(grid);
    for (int rep = 0; rep < 10; ++rep) {
        Box inner = outer;
        for (int i = 0; i < 2; ++i) {
            if (inner.hi[i] > inner.lo[i] && uniform01(rng) < 0.5) ++inner.lo[i];
            if (inner.hi[i] > inner.lo[i] && uniform01(rng) < 0.5) --inner.hi[i];
        }
        CHECK(min_prediction_bound(model, inner, grid) >=
              min_prediction_bound(model, outer, grid) - 1e-12);
        outer = inner;
    }
}

TEST_CASE("predict is constant on cell interiors") {
    Rng rng = make_rng(43);
    std::vector<double> lo{0.0, 0.0}, hi{1.0, 1.0};
    Dataset data = random_dataset(rng, 2, 25, lo, hi);
    const TreeEnsemble model = train(data, small_params(4, 2, 4));
    const IntervalGrid grid = build_interval_grid(model, lo, hi);
    for_each_cell(grid, full_box(grid), [&](const Box& cell) {
        std::vector<double> a(2), b(2);
        for (int i = 0; i < 2; ++i) {
            const double l = grid.edge(i, cell.lo[i]);
            const double u = grid.edge(i, cell.hi[i] + 1);
            a[i] = l + 0.25 * (u - l);
            b[i] = l + 0.75 * (u - l);
        }
        CHECK(predict(model, a) == predict(model, b));
    });
}

TEST_CASE("model io: lossless round trip") {
    Rng rng = make_rng(47);
    std::vector<double> lo{-1.0, -1.0, -1.0}, hi{1.0, 1.0, 1.0};
    Dataset data = random_dataset(rng, 3, 40, lo, hi);
    const TreeEnsemble model = train(data, small_params(7, 3, 4));

    const auto path = std::filesystem::temp_directory_path() / "treebo_model_roundtrip.json";
    save_model(model, path);
    const TreeEnsemble loaded = load_model(path);
    CHECK(loaded == model);
    for (int rep = 0; rep < 100; ++rep) {
        const auto x = sample_uniform_point(rng, lo, hi);
        CHECK(predict(model, x) == predict(loaded, x));
    }
    std::filesystem::remove(path);
}

TEST_CASE("model io: malformed files are reported with context") {
    const auto dir = std::filesystem::temp_directory_path();
    const auto path = dir / "treebo_model_bad.json";

    SUBCASE("truncated file") {
        std::ofstream(path) << "{\"version\": 1, \"num_features\": 1, \"trees\": [{\"nodes\": [";
        CHECK_THROWS_WITH_AS(load_model(path), doctest::Contains("treebo_model_bad.json"),
                             std::runtime_error);
    }
    SUBCASE("unsupported version") {
        std::ofstream(path) << R"({"version": 99, "num_features": 1, "base_offset": 0,
                                   "trees": []})";
        CHECK_THROWS_WITH_AS(load_model(path), doctest::Contains("unsupported model format"),
                             std::runtime_error);
    }
    SUBCASE("dangling child index names the node") {
        std::ofstream(path) << R"({"version": 1, "num_features": 1, "base_offset": 0, "trees":
            [{"nodes": [{"feature": 0, "threshold": 0.5, "left": 1, "right": 7},
                        {"value": 1}, {"value": 2}]}]})";
        CHECK_THROWS_WITH_AS(load_model(path), doctest::Contains("tree 0"), std::runtime_error);
    }
    std::filesystem::remove(path);
}
