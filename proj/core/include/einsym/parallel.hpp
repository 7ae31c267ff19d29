#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace einsym {

// Default worker count: the number of hardware threads (at least 1).
inline unsigned default_jobs() { return std::max(1U, std::thread::hardware_concurrency()); }

// Calls fn(i) for every i in [0, n) on up to `jobs` threads. Work items must
// write to disjoint outputs; the first exception (lowest index) is rethrown.
template <class Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
  const auto workers = static_cast<std::size_t>(std::max(1U, jobs));
  if (workers == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < std::min(workers, n); ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace einsym
