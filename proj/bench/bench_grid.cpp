#include <benchmark/benchmark.h>

#include "bpwa/reports.hpp"

using namespace bpwa;

namespace {

std::vector<double> grid(double lo, double hi, double step) { return Grid1D{lo, hi, step}.values(); }

void BM_PdLocus(benchmark::State& st) {
    const Model m;
    const auto W = grid(0.3, 2.0, 0.01);
    const auto exec = st.range(0) ? Execution::Parallel : Execution::Serial;
    for (auto _ : st) benchmark::DoNotOptimize(pd_locus(m, W, exec));
}
BENCHMARK(BM_PdLocus)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_SbLocus(benchmark::State& st) {
    const Model m;
    const auto W = grid(0.3, 1.6, 0.02), A = grid(0.05, 0.2, 0.05);
    const auto exec = st.range(0) ? Execution::Parallel : Execution::Serial;
    for (auto _ : st) benchmark::DoNotOptimize(sb_locus(m, W, A, exec));
}
BENCHMARK(BM_SbLocus)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_PowerMap(benchmark::State& st) {
    const Model m;
    SimOptions o;
    o.discard_periods = 20;
    o.window_periods = 16;
    const auto W = grid(0.5, 1.5, 0.25), A = grid(0.05, 0.15, 0.05);
    const auto exec = st.range(0) ? Execution::Parallel : Execution::Serial;
    for (auto _ : st) benchmark::DoNotOptimize(power_map(m, W, A, o, exec));
}
BENCHMARK(BM_PowerMap)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
