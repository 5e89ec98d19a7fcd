#include "charbvp/parallel.hpp"

#include <cstdlib>
#include <string>

namespace charbvp {

namespace {
int g_default_threads = 0;
}

int worker_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void set_worker_count(int jobs) {
#ifdef _OPENMP
    if (g_default_threads == 0) g_default_threads = omp_get_max_threads();
    omp_set_num_threads(jobs >= 1 ? jobs : g_default_threads);
#else
    (void)jobs;
    (void)g_default_threads;
#endif
}

void configure_workers_from_env() {
    const char* raw = std::getenv("CHARBVP_JOBS");
    if (raw == nullptr) return;
    try {
        const int jobs = std::stoi(raw);
        if (jobs >= 1) set_worker_count(jobs);
    } catch (const std::exception&) {
        // ignored: malformed values leave the runtime default in place
    }
}

}  // namespace charbvp
