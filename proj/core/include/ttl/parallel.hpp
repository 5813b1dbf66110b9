#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace ttl {

// Worker count used by parallel_for; defaults to $TTL_WORKERS or 1.
int worker_count();
void set_worker_count(int n);

// Runs body(i) for i in [0, n) on the worker pool. Each index must write only
// its own output slot; callers reduce in index order so results do not depend
// on the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

// Splits n items into fixed-size chunks independent of the worker count.
struct ChunkPlan {
  std::size_t n_items = 0;
  std::size_t chunk = 1;
  std::size_t count() const { return chunk ? (n_items + chunk - 1) / chunk : 0; }
  std::size_t begin(std::size_t c) const { return c * chunk; }
  std::size_t end(std::size_t c) const { return std::min(n_items, (c + 1) * chunk); }
};

ChunkPlan plan_chunks(std::size_t n_items, std::size_t preferred_chunk);

}  // namespace ttl
