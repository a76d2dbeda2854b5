#include "kleinian/common.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace kleinian {

namespace {
std::atomic<int> g_threads{1};
}

void set_num_threads(int k) { g_threads = std::max(1, k); }
int num_threads() { return g_threads; }

namespace {
thread_local bool in_parallel_region = false;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(num_threads()), count);
  // nested regions run on the calling worker
  if (workers <= 1 || in_parallel_region) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      in_parallel_region = true;
      for (;;) {
        const std::size_t i = next++;
        if (i >= count || failed) return;
        try {
          body(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace kleinian
