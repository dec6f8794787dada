#pragma once

#include <cstdint>
#include <functional>

namespace hypersketch {

// Runs fn over [begin, end) split into chunks whose boundaries are multiples
// of `align` (except at `end`). Work assignment is dynamic but the chunks
// themselves are fixed, so writers that own aligned regions produce identical
// results for any thread count.
void parallel_for_aligned(std::uint64_t begin, std::uint64_t end, std::uint64_t align,
                          int threads,
                          const std::function<void(std::uint64_t, std::uint64_t)>& fn);

int default_threads();

}  // namespace hypersketch
