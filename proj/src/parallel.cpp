#include "reachunder/parallel.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace reachunder {

void set_max_threads(int count)
{
#ifdef _OPENMP
    if (count >= 1) {
        omp_set_num_threads(count);
    }
#else
    (void)count;
#endif
}

int max_threads()
{
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

int configure_threads_from_env()
{
    if (const char* env = std::getenv("REACHUNDER_THREADS")) {
        try {
            set_max_threads(std::stoi(env));
        } catch (const std::exception&) {
            // malformed values leave the OpenMP default in place
        }
    }
    return max_threads();
}

}  // namespace reachunder
