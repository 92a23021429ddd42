#pragma once

#include <cstddef>
#include <functional>

namespace additest {

/// 0 -> hardware concurrency, otherwise the request itself.
unsigned resolve_threads(unsigned requested);

/// Runs body(i) for i in [0, count) on up to `threads` workers. Tasks must
/// write to disjoint slots; there is no ordering guarantee between them.
/// The first exception thrown by any task is rethrown after all workers join.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace additest
