// Microbenchmarks for the hot paths: distance kernel, exact top-k scan,
// graph optimization, and single-query traversal.

#include <benchmark/benchmark.h>

#include <random>

#include "fodg/graph_opt.hpp"
#include "fodg/knn_build.hpp"
#include "fodg/search.hpp"
#include "fodg/topk.hpp"

namespace {

fodg::Dataset uniform_dataset(std::uint32_t n_rows, std::uint32_t dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> dist(0.0f, 1.0f);
    std::vector<float> data(static_cast<std::size_t>(n_rows) * dim);
    for (auto& v : data) v = dist(rng);
    return fodg::Dataset(dim, std::move(data));
}

void BM_SquaredL2(benchmark::State& state) {
    auto dim = static_cast<std::uint32_t>(state.range(0));
    fodg::Dataset ds = uniform_dataset(2, dim, 1);
    for (auto _ : state)
        benchmark::DoNotOptimize(fodg::squared_l2(ds.row(0), ds.row(1)));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SquaredL2)->Arg(64)->Arg(128)->Arg(960);

void BM_ExactTopk(benchmark::State& state) {
    auto n = static_cast<std::uint32_t>(state.range(0));
    fodg::Dataset ds = uniform_dataset(n, 64, 2);
    std::vector<float> q(64, 0.5f);
    for (auto _ : state)
        benchmark::DoNotOptimize(fodg::exact_topk(ds, q, 10));
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_ExactTopk)->Arg(1000)->Arg(10000);

void BM_Optimize(benchmark::State& state) {
    auto n = static_cast<std::uint32_t>(state.range(0));
    fodg::Dataset ds = uniform_dataset(n, 64, 3);
    fodg::KnnGraph knn = fodg::exact_knn_graph(ds, 32);
    for (auto _ : state)
        benchmark::DoNotOptimize(fodg::optimize(knn, 16, {}));
}
BENCHMARK(BM_Optimize)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_SearchOne(benchmark::State& state) {
    auto topm = static_cast<std::uint32_t>(state.range(0));
    fodg::Dataset ds = uniform_dataset(10000, 64, 4);
    fodg::Graph graph = fodg::optimize(fodg::exact_knn_graph(ds, 64), 32, {});
    std::vector<float> q(64, 0.5f);
    fodg::SearchParams params;
    params.k = 10;
    params.topm = topm;
    params.width = 2;
    for (auto _ : state)
        benchmark::DoNotOptimize(fodg::search_one(graph, ds, q, params));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SearchOne)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
