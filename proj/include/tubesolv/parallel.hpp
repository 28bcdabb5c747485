#pragma once

#include <algorithm>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace tubesolv {

// Chunked parallel loop over [0, n).  Workers own disjoint contiguous ranges
// and write only to their own slots, so results are deterministic regardless
// of the thread count.  threads == 0 means hardware concurrency.
inline void parallel_for(int n, const std::function<void(int)>& fn, int threads = 0) {
  if (n <= 0) return;
  unsigned hw = std::thread::hardware_concurrency();
  int nt = threads > 0 ? threads : int(hw ? hw : 1);
  nt = std::min(nt, n);
  if (nt <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nt);
  std::exception_ptr err;
  std::mutex err_mutex;
  for (int w = 0; w < nt; ++w) {
    const int lo = int(long(n) * w / nt);
    const int hi = int(long(n) * (w + 1) / nt);
    pool.emplace_back([&, lo, hi]() {
      try {
        for (int i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

} // namespace tubesolv
