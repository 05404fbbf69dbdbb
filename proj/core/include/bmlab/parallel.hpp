#pragma once

#include <cstddef>
#include <functional>

namespace bmlab {

int hardware_threads();

// Runs fn(begin, end) over a fixed partition of [0, count) into chunks of
// `chunk` items. The partition depends only on (count, chunk), never on the
// worker count, so any reduction into per-chunk or per-item slots is
// bit-stable across thread counts. fn must write only to disjoint state.
void parallel_for_chunks(std::size_t count, std::size_t chunk, int threads,
                         const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace bmlab
