#include <cmath>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "hydrosig/extractor.hpp"
#include "hydrosig/forest.hpp"

namespace {

std::vector<hydrosig::TimeSeries> make_series(std::size_t count) {
    std::vector<hydrosig::TimeSeries> out;
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    for (std::size_t i = 0; i < count; ++i) {
        hydrosig::TimeSeries ts;
        ts.id = "s" + std::to_string(i);
        double prev = 0.0;
        for (int t = 0; t < 480; ++t) {
            prev = 0.6 * prev + g(rng);
            ts.values.push_back(prev + std::sin(2.0 * M_PI * t / 12.0));
        }
        out.push_back(std::move(ts));
    }
    return out;
}

const std::vector<hydrosig::TimeSeries>& series() {
    static const auto s = make_series(64);
    return s;
}

struct ForestFixture {
    hydrosig::FeatureMatrix x;
    hydrosig::Forest forest;
};

const ForestFixture& forest_fixture() {
    static const ForestFixture f = [] {
        ForestFixture out;
        std::mt19937_64 rng(5);
        std::normal_distribution<double> g;
        std::vector<int> y;
        for (int j = 0; j < 10; ++j) out.x.columns.push_back("f" + std::to_string(j));
        for (int r = 0; r < 400; ++r) {
            out.x.ids.push_back("r" + std::to_string(r));
            for (int j = 0; j < 10; ++j) out.x.values.push_back(g(rng) + (j == r % 4 ? 2.0 : 0.0));
            y.push_back(r % 4 + 1);
        }
        hydrosig::ForestOptions o;
        o.n_trees = 500;
        o.seed = 3;
        out.forest = hydrosig::fit_classifier(out.x, y, o);
        return out;
    }();
    return f;
}

void BM_ExtractSerial(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(hydrosig::extract_batch_serial(series(), 1));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(series().size()));
}

void BM_ExtractParallel(benchmark::State& state) {
    const int threads = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(hydrosig::extract_batch(series(), 1, threads));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(series().size()));
}

void BM_ProximitySerial(benchmark::State& state) {
    const auto& f = forest_fixture();
    for (auto _ : state) benchmark::DoNotOptimize(hydrosig::proximity_serial(f.forest, f.x));
}

void BM_ProximityParallel(benchmark::State& state) {
    auto f = forest_fixture();
    f.forest.options.threads = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(hydrosig::proximity(f.forest, f.x));
}

}  // namespace

BENCHMARK(BM_ExtractSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExtractParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ProximitySerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ProximityParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
