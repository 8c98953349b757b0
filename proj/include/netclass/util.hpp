#pragma once

#include <functional>

namespace netclass {

// Worker cap for concurrent chains/folds/grid cells: NETCLASS_THREADS when
// set (minimum 1), otherwise the hardware thread count.
int worker_cap();

// Runs task(0..count-1) across up to worker_cap() threads. Tasks must not
// share mutable state. The first failing task's exception (lowest index)
// is rethrown after all workers finish.
void run_parallel(int count, const std::function<void(int)>& task);

}  // namespace netclass
