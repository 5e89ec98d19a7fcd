#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace charbvp {

/// Number of worker threads the parallel kernels will use.
int worker_count();

/// Sets the worker count; values < 1 restore the runtime default.
void set_worker_count(int jobs);

/// Reads CHARBVP_JOBS and applies it when set to a positive integer.
void configure_workers_from_env();

/// Runs body(i) for i in [0, count) across OpenMP threads. The first
/// exception thrown by any iteration is rethrown on the calling thread.
template <class Body>
void parallel_for(std::ptrdiff_t count, Body&& body) {
    std::exception_ptr failure;
    std::mutex guard;
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        {
            std::lock_guard lock(guard);
            if (failure) continue;
        }
        try {
            body(i);
        } catch (...) {
            std::lock_guard lock(guard);
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace charbvp
