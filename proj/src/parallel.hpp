// Copyright 2026 The tvcov Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef TVCOV_SRC_PARALLEL_HPP_
#define TVCOV_SRC_PARALLEL_HPP_

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace tvcov::internal {

// Runs fn(i) for i in [0, n) on up to `threads` workers. Work items must be
// independent; the first exception is rethrown after all workers join.
template <typename Fn>
void ParallelFor(int n, int threads, Fn&& fn) {
  if (threads <= 0) threads = int(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (int i = next++; i < n && !failed; i = next++) {
      try {
        fn(i);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace tvcov::internal

#endif  // TVCOV_SRC_PARALLEL_HPP_
