#pragma once

#include <cstddef>
#include <functional>

namespace sandwich {

/// `requested` when nonzero, else SANDWICH_THREADS when set and positive, else
/// the hardware concurrency (at least 1).
unsigned resolve_threads(unsigned requested = 0);

/// Calls body(i) for i in [0, n) on up to `threads` workers. Indices are
/// handed out dynamically; the first exception thrown is rethrown.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace sandwich
