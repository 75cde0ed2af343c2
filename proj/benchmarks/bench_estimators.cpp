#include <benchmark/benchmark.h>

#include "entest/entest.hpp"

namespace {

using namespace entest;

void BM_Itm(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const SampleSet data = gen_mean_data(MeanSetting::make(MeanSettingId::s3, n, 0.8, 1));
    TrimConfig config;
    for (auto _ : state) {
        benchmark::DoNotOptimize(itm(data, config).value);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}
BENCHMARK(BM_Itm)->Arg(1000)->Arg(4000);

void BM_Itsm(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const RegressionData data = gen_regression_data(n, 20, 0.8, 1);
    TrimConfig config;
    for (auto _ : state) {
        benchmark::DoNotOptimize(itsm(data, config).value);
    }
}
BENCHMARK(BM_Itsm)->Arg(1000)->Arg(2000);

void BM_LeastSquares(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    const RegressionData data = gen_regression_data(10 * d, d, 1.0, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(least_squares(data.design(), data.response()));
    }
}
BENCHMARK(BM_LeastSquares)->Arg(20)->Arg(100);

void BM_JacobiEigenvalues(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    const SymmetricMatrix m = gen_psd_setting4(d, 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sym_eigenvalues(m));
    }
}
BENCHMARK(BM_JacobiEigenvalues)->Arg(10)->Arg(50);

}  // namespace
BENCHMARK_MAIN();
