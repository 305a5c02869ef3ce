#pragma once

#include <functional>

namespace miura {

/// Worker cap: MIURA_THREADS when set (>=1), hardware concurrency otherwise.
int thread_cap();

/// Runs body(i) for i in [begin, end). Each index is executed exactly once;
/// results must be written to disjoint slots so the output is independent of
/// the thread count.
void parallel_for(int begin, int end, const std::function<void(int)>& body);

} // namespace miura
