#include <benchmark/benchmark.h>

#include <algorithm>
#include <random>
#include <string>

#include "tscore/estimators.hpp"
#include "tscore/gsea.hpp"
#include "tscore/poly_core.hpp"
#include "tscore/simulation.hpp"

namespace
{

auto normals(std::size_t n, std::uint64_t seed) -> std::vector<double>
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d(0.0, 2.0);
    std::vector<double> v(n);
    for (auto& x : v)
    {
        x = d(rng);
    }
    return v;
}

void BM_SK(benchmark::State& state)
{
    const tscore::ApproxConfig cfg(150000, static_cast<int>(state.range(0)));
    const auto xs = normals(1024, 1);
    for (auto _ : state)
    {
        double acc = 0.0;
        for (const double x : xs)
        {
            acc += tscore::s_k(x, cfg);
        }
        benchmark::DoNotOptimize(acc);
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 1024);
}
BENCHMARK(BM_SK)->Arg(1)->Arg(8)->Arg(30);

void BM_EstimateTScore(benchmark::State& state)
{
    const auto kind = static_cast<tscore::EstimatorKind>(state.range(0));
    const std::size_t n = 150000;
    const tscore::ZPanel x(normals(n, 2));
    const tscore::ZPanel y(normals(n, 3));
    const tscore::ApproxConfig cfg(n);
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(tscore::estimate_tscore(x, y, kind, cfg, 7).value);
    }
    state.SetLabel(std::string(tscore::to_string(kind)));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_EstimateTScore)->DenseRange(0, 4)->Unit(benchmark::kMillisecond);

void BM_SampleMvn(benchmark::State& state)
{
    const auto cov = static_cast<tscore::CovKind>(state.range(0));
    const std::vector<double> mean(150000, 0.0);
    tscore::Engine rng(4);
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(tscore::sample_mvn(mean, cov, rng).data());
    }
    state.SetLabel(std::string(tscore::to_string(cov)));
}
BENCHMARK(BM_SampleMvn)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

void BM_KsStatistic(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto v = normals(n, 5);
    tscore::ScoreMap scores;
    tscore::GeneSet set{"S", {}, 0};
    for (std::size_t i = 0; i < n; ++i)
    {
        scores.emplace("g" + std::to_string(i), v[i]);
        if (i % 20 == 0)
        {
            set.members.push_back("g" + std::to_string(i));
        }
    }
    std::sort(set.members.begin(), set.members.end());
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(tscore::ks_statistic(scores, set));
    }
}
BENCHMARK(BM_KsStatistic)->Arg(1000)->Arg(10000);

}  // namespace
BENCHMARK_MAIN();
