#include "mintime/util.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace mintime {

int worker_threads() {
  int cap = 0;
  if (const char* env = std::getenv("MINTIME_THREADS")) {
    try {
      cap = std::max(0, std::stoi(env));
    } catch (...) {
      cap = 0;
    }
  }
  if (cap == 0) {
    unsigned hw = std::thread::hardware_concurrency();
    cap = static_cast<int>(std::clamp(hw, 1u, 8u));
  }
  return cap;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  const int workers = std::min<std::size_t>(worker_threads(), count);
  if (workers <= 1 || count < 4) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace mintime
