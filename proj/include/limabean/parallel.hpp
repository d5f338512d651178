#pragma once
#include <cstddef>
#include <functional>

namespace limabean {

// Thread count actually used for a request: explicit argument wins, then the
// LIMABEAN_THREADS environment variable, then hardware concurrency.
int resolve_thread_count(int requested = 0);

// Runs fn(i) for every i in [0, n) across the given number of threads.
// Work items are claimed from a shared atomic counter, so determinism of the
// overall result requires each fn(i) to touch only its own output slot --
// callers that need reproducible randomness should key an RngStream on i
// rather than on the executing thread.  The first exception thrown by any
// item is rethrown on the calling thread after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  int threads = 0);

}  // namespace limabean
