#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace shiftconc {

inline unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Runs body(begin, end) over contiguous chunks of [0, count). Each index is
// visited by exactly one call, so results written per index do not depend on
// the thread count.
template <typename Body>
void parallel_chunks(std::size_t count, unsigned threads, Body&& body) {
  threads = std::max(1u, threads);
  if (threads == 1 || count < 2) {
    body(std::size_t{0}, count);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(threads, count);
  const std::size_t chunk = (count + workers - 1) / workers;
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, w, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace shiftconc
