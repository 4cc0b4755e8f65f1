#pragma once

#include <cstddef>
#include <functional>
#include <optional>

namespace otr {

// Worker count to use: an explicit request wins, then the OTR_THREADS
// environment variable, then the number of logical cores. Always >= 1.
unsigned resolve_threads(std::optional<unsigned> requested = std::nullopt);

// Runs body(i) for i in [0, count) on up to `threads` workers. Tasks are
// claimed dynamically, so bodies must write results by index only. The first
// exception thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace otr
