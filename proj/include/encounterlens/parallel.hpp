#pragma once

#include <cstddef>
#include <functional>

namespace encounterlens {

/// Worker cap: ENCOUNTERLENS_THREADS when set to a positive integer, else hardware concurrency.
[[nodiscard]] std::size_t worker_count();

/// Calls body(i) for i in [0, n) on up to worker_count() threads. Each index runs
/// exactly once; callers write into per-index slots so results stay deterministic.
/// The first exception thrown by any body is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace encounterlens
