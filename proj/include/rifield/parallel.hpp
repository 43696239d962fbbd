#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace rifield::parallel {

inline int& thread_budget() {
  static int budget = 1;
  return budget;
}

inline void set_threads(int n) { thread_budget() = std::max(1, n); }

/// Runs f(i) for i in [0, count). Each task writes only its own output slot,
/// so results are identical for any thread count.
template <typename F>
void for_each_index(std::size_t count, F&& f) {
  const int threads =
      static_cast<int>(std::min<std::size_t>(
          static_cast<std::size_t>(thread_budget()), count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count;
           i = next.fetch_add(1))
        f(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace rifield::parallel
