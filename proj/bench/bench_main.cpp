// Serial reference vs OpenMP kernels.

#include <benchmark/benchmark.h>

#include <random>

#include "oracles.hpp"
#include "phasefeyn/kernels.hpp"
#include "phasefeyn/moments.hpp"
#include "phasefeyn/parallel.hpp"
#include "phasefeyn/random.hpp"

using namespace phasefeyn;

namespace {

void bm_kernel_matrix(benchmark::State& state, par::Policy policy) {
    const TimeGrid grid = build_grid(1.0, 2.0, static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_window_kernel_matrix(grid, policy));
    }
}

void bm_mc_quadratic(benchmark::State& state, par::Policy policy) {
    std::mt19937_64 rng(1);
    const Eigen::MatrixXd K = random_symmetric_in_range(5, rng, -0.2, 0.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(oracle::mc_gaussian_quadratic(K, state.range(0), 7, policy));
    }
}

void bm_batch_transform(benchmark::State& state, par::Policy policy) {
    const TimeGrid grid = build_grid(1.0, 2.0, 512);
    const GaussKernelSpec spec = make_free_spec(grid, 0.5);
    std::mt19937_64 rng(2);
    std::vector<PhaseFunction> fields;
    for (int i = 0; i < 64; ++i) fields.push_back(random_smooth_phase_function(grid, rng));
    std::vector<Complex> values(fields.size());
    for (auto _ : state) {
        par::for_index(
            static_cast<int>(fields.size()),
            [&](int i) { values[i] = master_t_transform(spec, fields[i]).value; }, policy);
        benchmark::DoNotOptimize(values);
    }
}

void bm_ccr_schedule(benchmark::State& state, par::Policy policy) {
    // schedule points fan out; the per-point work is the serial moment math
    const CcrSchedule sched = default_ccr_schedule(0.5, 1.0);
    const TimeGrid grid = build_grid(1.0, 2.0, 2048);
    const PhaseFunction f0 = PhaseFunction::zero(grid);
    std::vector<Complex> values(sched.size());
    for (auto _ : state) {
        par::for_index(
            static_cast<int>(sched.size()),
            [&](int i) {
                CcrParams p{0.5, sched[i].first,
                            Mollifier{MollifierFamily::gaussian, 1, sched[i].second, 0.5}, f0};
                values[i] = ccr_difference(p, 1.0, 0.0);
            },
            policy);
        benchmark::DoNotOptimize(values);
    }
}

}  // namespace

BENCHMARK_CAPTURE(bm_kernel_matrix, serial, par::Policy::serial)->Arg(1024)->Arg(2048);
BENCHMARK_CAPTURE(bm_kernel_matrix, openmp, par::Policy::openmp)->Arg(1024)->Arg(2048);
BENCHMARK_CAPTURE(bm_mc_quadratic, serial, par::Policy::serial)->Arg(200000);
BENCHMARK_CAPTURE(bm_mc_quadratic, openmp, par::Policy::openmp)->Arg(200000);
BENCHMARK_CAPTURE(bm_batch_transform, serial, par::Policy::serial);
BENCHMARK_CAPTURE(bm_batch_transform, openmp, par::Policy::openmp);
BENCHMARK_CAPTURE(bm_ccr_schedule, serial, par::Policy::serial);
BENCHMARK_CAPTURE(bm_ccr_schedule, openmp, par::Policy::openmp);

BENCHMARK_MAIN();
