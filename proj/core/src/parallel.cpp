#include "lfrac/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

namespace lfrac {

namespace {
std::atomic<int> g_max_threads{1};
}

void set_max_threads(int n) {
  if (n < 1) throw std::invalid_argument("thread count must be at least 1");
  g_max_threads.store(n);
}

int max_threads() { return g_max_threads.load(); }

void parallel_for(std::size_t count,
                  const std::function<void(std::size_t, std::size_t)>& body) {
  const std::size_t threads =
      std::min<std::size_t>(static_cast<std::size_t>(max_threads()),
                            std::max<std::size_t>(count / 1024, 1));
  if (threads <= 1 || count == 0) {
    if (count > 0) body(0, count);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  std::exception_ptr error;
  std::mutex error_mutex;
  const std::size_t chunk = (count + threads - 1) / threads;
  for (std::size_t t = 0; t < threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(begin + chunk, count);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace lfrac
