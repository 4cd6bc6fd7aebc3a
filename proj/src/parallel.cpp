#include "dynlf/parallel.hpp"

#include <exception>
#include <thread>
#include <vector>

namespace dynlf {

void parallel_for(int begin, int end, int threads, const std::function<void(int)>& fn) {
  const int count = end - begin;
  if (count <= 0) return;
  if (threads < 1) threads = 1;
  if (threads > count) threads = count;

  if (threads == 1) {
    for (int k = begin; k < end; ++k) fn(k);
    return;
  }

  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(threads));
  const int base = count / threads;
  const int spill = count % threads;
  int chunk_begin = begin;
  for (int c = 0; c < threads; ++c) {
    const int chunk = base + (c < spill ? 1 : 0);
    const int lo = chunk_begin;
    const int hi = chunk_begin + chunk;
    chunk_begin = hi;
    workers.emplace_back([lo, hi, c, &fn, &errors] {
      try {
        for (int k = lo; k < hi; ++k) fn(k);
      } catch (...) {
        errors[static_cast<std::size_t>(c)] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace dynlf
