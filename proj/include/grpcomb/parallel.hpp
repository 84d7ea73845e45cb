#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace grpcomb {

// Runs body(i) for i in [0, n) on up to `threads` workers. Each index is
// handled exactly once; callers write results by index so the outcome does
// not depend on the schedule. The first exception is rethrown.
template <class Body>
void parallel_for(size_t n, int threads, Body body)
{
  size_t workers = std::min<size_t>(threads < 1 ? 1 : size_t(threads), n);
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i)
      body(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto run = [&] {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= n)
        return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err)
          err = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (size_t w = 0; w < workers; ++w)
    pool.emplace_back(run);
  for (auto &t : pool)
    t.join();
  if (err)
    std::rethrow_exception(err);
}

} // namespace grpcomb
