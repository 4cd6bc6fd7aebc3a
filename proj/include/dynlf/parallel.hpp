#pragma once

#include <functional>

namespace dynlf {

/// Runs fn(k) for k in [begin, end), split into contiguous chunks, one per
/// worker. Items must be independent and write disjoint state; results are
/// then identical for every thread count. The first exception (lowest chunk)
/// is rethrown after all workers join.
void parallel_for(int begin, int end, int threads, const std::function<void(int)>& fn);

}  // namespace dynlf
