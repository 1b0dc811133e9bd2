#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qhl {

// Runs fn(i) for i in [0, n) on up to `workers` OpenMP threads (0 = runtime
// default). fn must only write to per-index state; under that contract the
// result is identical for any worker count. Exceptions are captured and the
// first one is rethrown after the loop completes.
template <typename Fn>
void for_each_index(std::size_t n, int workers, Fn&& fn) {
    std::exception_ptr err = nullptr;
    std::mutex err_mu;
#ifdef _OPENMP
    int prev = omp_get_max_threads();
    if (workers > 0) omp_set_num_threads(workers);
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        if (err) continue;
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
            std::lock_guard<std::mutex> lk(err_mu);
            if (!err) err = std::current_exception();
        }
    }
    if (workers > 0) omp_set_num_threads(prev);
#else
    (void)workers;
    for (std::size_t i = 0; i < n; ++i) {
        try {
            fn(i);
        } catch (...) {
            if (!err) err = std::current_exception();
            break;
        }
    }
#endif
    if (err) std::rethrow_exception(err);
}

// Serial reference loop. Kept separate (not just workers=1) so tests and the
// benchmark can compare the parallel path against a plain for loop.
template <typename Fn>
void for_each_index_serial(std::size_t n, Fn&& fn) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
}

inline int hardware_workers() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace qhl
