#pragma once

#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace adaptsim {

/// Execution policy for the grid/window kernels. Every kernel has a serial
/// reference path that the parallel path must reproduce bit-for-bit; the
/// consistency tests and bench_kernels compare the two.
enum class Exec { serial, parallel };

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

/// Index loop over [0, n). Reductions are left to the call sites, which
/// either use order-insensitive combiners (min/max, integer sums) or fold
/// per-index slots serially, so results do not depend on the schedule.
template <class F>
void parallel_for(std::int64_t n, Exec exec, F&& body) {
    if (exec == Exec::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (std::int64_t i = 0; i < n; ++i) body(i);
    } else {
        for (std::int64_t i = 0; i < n; ++i) body(i);
    }
}

}  // namespace adaptsim
