// Serial vs OpenMP comparison for the scan kernels and the per-interval
// direction estimation. Run with --benchmark_filter=... to narrow.

#include <benchmark/benchmark.h>

#include "covcpd/datagen.hpp"
#include "covcpd/scan.hpp"
#include "covcpd/wbsip.hpp"

namespace {

using namespace covcpd;

SegmentModel bench_model(std::int64_t n, int p) {
    SymMat base = SymMat::identity(p);
    SymMat alt = SymMat::identity(p);
    alt *= 2.5;
    return SegmentModel(n, {n / 3, 2 * n / 3}, {base, alt, base});
}

ObservationMatrix bench_data(std::int64_t n, int p) {
    return gen_series({bench_model(n, p), NoiseFamily::gaussian, 20240517});
}

void bm_opnorm_scan_serial(benchmark::State& state) {
    const std::int64_t n = state.range(0);
    const int p = static_cast<int>(state.range(1));
    const ObservationMatrix x = bench_data(n, p);
    const OuterPrefix pre(x);
    for (auto _ : state) {
        auto r = opnorm_scan_serial(pre, 0, n, 1, n - 1);
        benchmark::DoNotOptimize(r);
    }
}

void bm_opnorm_scan_parallel(benchmark::State& state) {
    const std::int64_t n = state.range(0);
    const int p = static_cast<int>(state.range(1));
    const ObservationMatrix x = bench_data(n, p);
    const OuterPrefix pre(x);
    for (auto _ : state) {
        auto r = opnorm_scan(pre, 0, n, 1, n - 1);
        benchmark::DoNotOptimize(r);
    }
}

void bm_pc_directions_serial(benchmark::State& state) {
    const std::int64_t n = state.range(0);
    const int p = static_cast<int>(state.range(1));
    const ObservationMatrix x = bench_data(n, p);
    const IntervalSet intervals = draw_intervals(n, 200, 7);
    for (auto _ : state) {
        auto v = pc_directions_serial(x, intervals, 0.25);
        benchmark::DoNotOptimize(v);
    }
}

void bm_pc_directions_parallel(benchmark::State& state) {
    const std::int64_t n = state.range(0);
    const int p = static_cast<int>(state.range(1));
    const ObservationMatrix x = bench_data(n, p);
    const IntervalSet intervals = draw_intervals(n, 200, 7);
    for (auto _ : state) {
        auto v = pc_directions(x, intervals, 0.25);
        benchmark::DoNotOptimize(v);
    }
}

BENCHMARK(bm_opnorm_scan_serial)->Args({1000, 10})->Args({2000, 20})->Unit(benchmark::kMillisecond);
BENCHMARK(bm_opnorm_scan_parallel)->Args({1000, 10})->Args({2000, 20})->Unit(benchmark::kMillisecond);
BENCHMARK(bm_pc_directions_serial)->Args({1000, 10})->Unit(benchmark::kMillisecond);
BENCHMARK(bm_pc_directions_parallel)->Args({1000, 10})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
