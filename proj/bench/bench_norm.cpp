// Serial vs OpenMP batch norm evaluation on a fixed random workload.
#include "tslab/experiments.hpp"
#include "tslab/normengine.hpp"
#include "tslab/spaces.hpp"

#include <benchmark/benchmark.h>

#include <map>

using namespace tslab;

namespace {

std::vector<SparseVector> workload(std::size_t count, int points)
{
    Rng rng(kDefaultSeed, 17);
    std::vector<SparseVector> xs;
    while (xs.size() < count) {
        std::map<Index, Q> m;
        while (static_cast<int>(m.size()) < points) {
            Q v(rng.between(1, 6), rng.between(1, 4));
            v.canonicalize();
            m[rng.between(1, 3 * points)] = v;
        }
        xs.emplace_back(m);
    }
    return xs;
}

void BM_BatchSerial(benchmark::State& state)
{
    auto xs = workload(static_cast<std::size_t>(state.range(0)), 10);
    SpaceSpec s = preset("mixed_fn(1/(n+1))");
    for (auto _ : state) benchmark::DoNotOptimize(norm_batch_serial(xs, s));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_BatchParallel(benchmark::State& state)
{
    auto xs = workload(static_cast<std::size_t>(state.range(0)), 10);
    SpaceSpec s = preset("mixed_fn(1/(n+1))");
    for (auto _ : state) benchmark::DoNotOptimize(norm_batch(xs, s));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SingleAllowable(benchmark::State& state)
{
    auto xs = workload(1, static_cast<int>(state.range(0)));
    SpaceSpec s = preset("tsirelson_modified");
    for (auto _ : state) benchmark::DoNotOptimize(norm(xs.front(), s));
}

} // namespace

BENCHMARK(BM_BatchSerial)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BatchParallel)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SingleAllowable)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
