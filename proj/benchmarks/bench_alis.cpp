#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "alis/bounds.hpp"
#include "alis/data.hpp"
#include "alis/loop.hpp"
#include "alis/sampling.hpp"
#include "alis/train.hpp"

namespace {

std::vector<double> losses(std::size_t n) {
    std::mt19937_64 g(1);
    std::uniform_real_distribution<double> u(0.0, 4.0);
    std::vector<double> l(n);
    for (auto& x : l) x = u(g);
    return l;
}

void BM_OptimalDistribution(benchmark::State& state) {
    const auto l = losses(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(alis::optimal_distribution(l));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_OptimalDistribution)->Range(64, 1 << 16);

void BM_DrawQueries(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto dist = alis::smooth(alis::optimal_distribution(losses(n)), 0.01);
    alis::PoolState pool;
    for (std::size_t i = 0; i < n; ++i) pool.unlabeled.push_back(i);
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(alis::draw_queries(dist, pool, 10, seed++));
}
BENCHMARK(BM_DrawQueries)->Range(64, 1 << 16);

void BM_TrainWeighted(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto data = alis::generate({alis::TwoGaussians{}, n, 2, 3});
    std::vector<alis::WeightedPoint> pts;
    for (std::size_t i = 0; i < n; ++i) pts.push_back({data.row(i), data.label(i), 1.0 + double(i % 5)});
    const alis::TrainConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(alis::train_weighted(pts, alis::LossKind::Squared, cfg));
}
BENCHMARK(BM_TrainWeighted)->Arg(20)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_SimulateEstimator(benchmark::State& state) {
    const auto l = losses(50);
    const auto dist = alis::optimal_distribution(l);
    const auto trials = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(alis::simulate_estimator(l, dist, trials, 7));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateEstimator)->Arg(1000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_RunAlis(benchmark::State& state) {
    const auto data = alis::generate({alis::TwoGaussians{}, 2000, 2, 7});
    std::vector<alis::Index> seeds;
    for (alis::Index i = 0; i < 20; ++i) seeds.push_back(i * 97);
    alis::LoopConfig cfg;
    cfg.strategy = state.range(0) ? alis::Strategy::Optimal : alis::Strategy::Uniform;
    for (auto _ : state) benchmark::DoNotOptimize(alis::run_alis(data, seeds, cfg));
}
BENCHMARK(BM_RunAlis)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
