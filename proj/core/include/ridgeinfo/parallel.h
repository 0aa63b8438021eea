#ifndef RIDGEINFO_PARALLEL_H
#define RIDGEINFO_PARALLEL_H

#include <cstddef>
#include <functional>

namespace ridgeinfo {

/// Upper bound on worker threads used by replicate loops. 0 means
/// hardware concurrency. Results never depend on this value.
void set_max_threads(unsigned threads);
unsigned max_threads();

/// Calls body(i) for every i in [0, count). Bodies must only write to
/// slots owned by their index. Exceptions are rethrown on the caller.
void parallel_for(size_t count, const std::function<void(size_t)> &body);

}  // namespace ridgeinfo

#endif
