#pragma once

#include <cstddef>
#include <functional>

namespace mfc {

/// Number of worker threads used by parallel_for. Defaults to 1.
std::size_t thread_count();
void set_thread_count(std::size_t n);

/// Runs body(i) for i in [0, n), split into contiguous chunks over the
/// configured number of threads. Each index is processed exactly once and
/// bodies must only write to index-owned storage, so results never depend
/// on the schedule. Nested calls run serially on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace mfc
