#include <benchmark/benchmark.h>

#include "pencilcrt/bench_harness.hpp"
#include "pencilcrt/cs_baseline.hpp"
#include "pencilcrt/dealias_crt.hpp"
#include "pencilcrt/matrix_pencil.hpp"
#include "pencilcrt/pipeline.hpp"

using namespace pencilcrt;

namespace {

void BM_SolvePencil(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto s = add_awgn(synthesize(default_ground_truth(), 101, n), 30.0, 1);
    PencilConfig cfg = harness_pencil_defaults();
    cfg.model_order = 10;
    for (auto _ : state) benchmark::DoNotOptimize(solve_pencil(s, cfg));
}
BENCHMARK(BM_SolvePencil)->Arg(108)->Arg(216)->Arg(864)->Unit(benchmark::kMillisecond);

void BM_Pipeline(benchmark::State& state) {
    const auto spec = default_ground_truth();
    const auto a = synthesize(spec, 101, 256);
    const auto b = synthesize(spec, 103, 256);
    PipelineConfig cfg;
    cfg.dealias = DealiasConfig::for_max_frequency(101, 103, 10000);
    for (auto _ : state) benchmark::DoNotOptimize(run_pipeline(a, b, cfg));
}
BENCHMARK(BM_Pipeline)->Unit(benchmark::kMillisecond);

void BM_ResolveFrequency(benchmark::State& state) {
    DealiasConfig cfg = DealiasConfig::for_max_frequency(101, 103, 10240);
    cfg.freq_match_tol_hz = 0.5;
    PairedComponent p;
    p.chan1.alias_freq_hz = alias_of(7308.853, 101);
    p.chan2.alias_freq_hz = alias_of(7308.853, 103);
    p.chan1.amplitude = p.chan2.amplitude = 1.0;
    for (auto _ : state) benchmark::DoNotOptimize(resolve_frequency(p, cfg));
}
BENCHMARK(BM_ResolveFrequency);

void BM_SensingMatrix(benchmark::State& state) {
    const auto m = static_cast<std::size_t>(state.range(0));
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(make_sensing_matrix(m, 2048, seed++));
}
BENCHMARK(BM_SensingMatrix)->Arg(54)->Arg(216)->Unit(benchmark::kMillisecond);

void BM_Omp(benchmark::State& state) {
    const auto m = static_cast<std::size_t>(state.range(0));
    const auto x = synthesize(default_ground_truth(), 10240, 2048);
    const auto phi = make_sensing_matrix(m, 2048, 3);
    const auto dict = dft_dictionary(phi);
    const auto y = measure(phi, x.samples);
    for (auto _ : state) benchmark::DoNotOptimize(omp_recover_with_dictionary(y, dict, 10));
}
BENCHMARK(BM_Omp)->Arg(54)->Arg(216)->Unit(benchmark::kMillisecond);

}  // namespace
