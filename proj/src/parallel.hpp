#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace dissolv::detail {

/// Worker count: DISSOLVPCB_THREADS if set to a positive integer, else the
/// hardware concurrency.
inline unsigned worker_count() {
  if (const char* env = std::getenv("DISSOLVPCB_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [0, n). Work items are claimed in contiguous
/// blocks; callers write results into per-index slots so the outcome does
/// not depend on scheduling.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  const std::size_t workers = std::min<std::size_t>(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        const std::size_t begin = n * w / workers, end = n * (w + 1) / workers;
        for (std::size_t i = begin; i < end; ++i) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace dissolv::detail
