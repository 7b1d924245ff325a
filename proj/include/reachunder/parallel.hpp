#ifndef REACHUNDER_PARALLEL_HPP
#define REACHUNDER_PARALLEL_HPP

namespace reachunder {

/// Applies REACHUNDER_THREADS (a positive integer) as the worker cap.
/// Returns the resulting maximum thread count; 1 without OpenMP.
int configure_threads_from_env();

/// Caps worker parallelism; values below 1 are ignored.
void set_max_threads(int count);

int max_threads();

}  // namespace reachunder

#endif
