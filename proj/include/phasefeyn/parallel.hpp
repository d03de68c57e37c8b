#pragma once

#include <cstdint>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace phasefeyn::par {

// Worker cap: min(OpenMP max threads, PHASEFEYN_THREADS if set).
int max_threads();

// Execution policy for the dual-path kernels. Serial is the reference
// implementation; OpenMP runs the identical per-item computation across
// threads, so results are bitwise equal.
enum class Policy { serial, openmp };

// Apply fn(i) for i in [0, n). Items must be independent.
template <class F>
void for_index(int n, F&& fn, Policy policy = Policy::openmp) {
#ifdef _OPENMP
    if (policy == Policy::openmp && max_threads() > 1 && n > 1) {
#pragma omp parallel for schedule(static) num_threads(max_threads())
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
#endif
    (void)policy;
    for (int i = 0; i < n; ++i) fn(i);
}

// Evaluate fn(chunk) for each chunk, then combine the partial results in
// chunk order. The fixed chunk count keeps the combination order (and hence
// the floating-point result) independent of the thread count.
template <class T, class F>
std::vector<T> map_chunks(int n_chunks, F&& fn, Policy policy = Policy::openmp) {
    std::vector<T> out(n_chunks);
    for_index(
        n_chunks, [&](int c) { out[c] = fn(c); }, policy);
    return out;
}

// splitmix64: cheap, well-spread stream seeding for per-chunk RNGs.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace phasefeyn::par
