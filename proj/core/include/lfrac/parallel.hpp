#pragma once

#include <cstddef>
#include <functional>

namespace lfrac {

// Global worker cap for the loops below. Thread count never changes
// results: work is split into contiguous index ranges and every index
// writes only its own slot.
void set_max_threads(int n);
int max_threads();

void parallel_for(std::size_t count,
                  const std::function<void(std::size_t begin,
                                           std::size_t end)>& body);

}  // namespace lfrac
