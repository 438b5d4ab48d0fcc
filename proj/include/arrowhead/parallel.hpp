#pragma once

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace arrowhead {

/// Number of worker threads used by element- and column-parallel loops.
inline int num_threads()
{
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

inline void set_num_threads(int threads)
{
#ifdef _OPENMP
    if (threads > 0) {
        omp_set_num_threads(threads);
    }
#else
    (void)threads;
#endif
}

/// Applies ARROWHEAD_THREADS if it is set to a positive integer. Returns the
/// resulting thread count.
inline int configure_threads_from_env()
{
    if (const char* env = std::getenv("ARROWHEAD_THREADS")) {
        try {
            set_num_threads(std::stoi(env));
        } catch (const std::exception&) {
            // ignore malformed values
        }
    }
    return num_threads();
}

namespace detail {

// Loops shorter than this run serially; thread start-up dominates otherwise.
inline constexpr long parallel_grain = 64;

} // namespace detail

} // namespace arrowhead
