#pragma once

#include <cstdint>
#include <functional>

namespace vccgm {

// Worker count from VCCGM_THREADS. 0 or unset means single-threaded
// (deterministic mode); values > 1 enable fan-out for pure per-item work.
int worker_count();

// Runs fn(i) for i in [0, n). With worker_count() <= 1 this is a plain
// loop; otherwise items are split into contiguous blocks across threads.
// fn must be pure per item (no shared mutable state, no RNG). The first
// exception thrown by any worker is rethrown after all workers join.
void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& fn);

}  // namespace vccgm
