#include "ttl/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace ttl {

namespace {

int initial_workers() {
  if (const char* env = std::getenv("TTL_WORKERS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

std::atomic<int>& workers() {
  static std::atomic<int> w{initial_workers()};
  return w;
}

thread_local bool inside_pool = false;

}  // namespace

int worker_count() { return workers().load(); }

void set_worker_count(int n) { workers().store(std::max(1, n)); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  std::size_t nw = std::min<std::size_t>(static_cast<std::size_t>(worker_count()), n);
  // nested calls run inline on the calling worker
  if (nw <= 1 || inside_pool) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto run = [&] {
    inside_pool = true;
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) {
        inside_pool = false;
        return;
      }
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next.store(n);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(nw - 1);
  for (std::size_t w = 1; w < nw; ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

ChunkPlan plan_chunks(std::size_t n_items, std::size_t preferred_chunk) {
  return {n_items, std::max<std::size_t>(1, preferred_chunk)};
}

}  // namespace ttl
