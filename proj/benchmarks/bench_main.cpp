/// Timings of the residual assembly, one Newton solve and the phase-aware quadrature.

#include "bores/diagnostics.hpp"
#include "bores/djsolver.hpp"
#include "bores/oracles.hpp"
#include "bores/quadrature.hpp"

#include <benchmark/benchmark.h>

namespace {

const bores::FluidPair fluids{4.0, 1.0, false};

bores::FrontConfig bench_config(int nq, int np) {
    return bores::make_front_config(fluids, bores::conjugate_downstream(fluids) + 0.05, 16.0, nq, np, np);
}

void BM_residual(benchmark::State& st) {
    const auto cfg = bench_config(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
    const auto s = bores::tanh_state(cfg, fluids);
    for (auto _ : st) benchmark::DoNotOptimize(bores::assemble_residual(s, cfg, fluids));
    st.SetItemsProcessed(st.iterations() * cfg.nq * (cfg.np1 + cfg.np2));
}
BENCHMARK(BM_residual)->Args({161, 9})->Args({321, 17})->Args({641, 33})->Unit(benchmark::kMicrosecond);

void BM_newton(benchmark::State& st) {
    const auto cfg = bench_config(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
    const auto guess = bores::tanh_state(cfg, fluids);
    for (auto _ : st) benchmark::DoNotOptimize(bores::newton_solve(guess, cfg, fluids));
}
BENCHMARK(BM_newton)->Args({161, 9})->Args({321, 17})->Unit(benchmark::kMillisecond);

void BM_weiss_corner(benchmark::State& st) {
    const auto f = bores::sample_exact(bores::stokes_corner());
    const auto radii = bores::geometric_radii(1.0, 8, 2);
    for (auto _ : st) benchmark::DoNotOptimize(bores::weiss_M(f, radii));
}
BENCHMARK(BM_weiss_corner)->Unit(benchmark::kMillisecond);

void BM_area_with_label(benchmark::State& st) {
    const bores::PlaneLabel label = [](double x, double y) { return y < 0.3 * x ? 1 : 0; };
    const bores::PlaneFunction f = [](double x, double y) { return y < 0.3 * x ? x * x : 1.0 + y; };
    for (auto _ : st) benchmark::DoNotOptimize(bores::area_integral(f, label, 1.0, bores::Region::disk));
}
BENCHMARK(BM_area_with_label)->Unit(benchmark::kMicrosecond);

} // namespace

BENCHMARK_MAIN();
