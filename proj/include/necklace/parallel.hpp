#pragma once

#include <cstddef>
#include <functional>

namespace necklace {

/// Worker count: hardware concurrency, capped by NECKLACE_THREADS when set.
[[nodiscard]] unsigned worker_count();

/// Runs body(i) for i in [0, n) across worker_count() threads. Each index is
/// visited exactly once; the first exception thrown by any body is rethrown
/// after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace necklace
