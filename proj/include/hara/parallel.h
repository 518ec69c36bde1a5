#pragma once

#include <functional>

namespace hara {

// Worker count from HARA_NUM_THREADS, defaulting to the hardware concurrency.
int ThreadCountFromEnv();

// Runs fn(0..count-1) across `threads` workers. Exceptions from fn are
// rethrown (the first one) after all workers finish.
void ParallelFor(int count, int threads, const std::function<void(int)>& fn);

}  // namespace hara
