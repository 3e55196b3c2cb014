#pragma once

#include <atomic>
#include <thread>
#include <vector>

#include "renewalab/core.hpp"

namespace renewalab {

inline int default_workers() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : int(n);
}

/// Run fn(chunk_index, begin, end) over [0, n_items) split into fixed-size
/// chunks. Results are collected per chunk and can be reduced in chunk
/// order, so the outcome is independent of the worker count.
template <class T, class F>
std::vector<T> map_chunks(std::int64_t n_items, std::int64_t chunk_size, int workers, F&& fn) {
  if (chunk_size <= 0) throw std::invalid_argument("map_chunks: chunk_size must be positive");
  const std::int64_t n_chunks = (n_items + chunk_size - 1) / chunk_size;
  std::vector<T> results;
  results.resize(static_cast<size_t>(n_chunks));
  if (n_chunks == 0) return results;
  workers = int(std::max<std::int64_t>(1, std::min<std::int64_t>(workers, n_chunks)));
  std::atomic<std::int64_t> next{0};
  auto body = [&] {
    while (true) {
      const std::int64_t c = next.fetch_add(1);
      if (c >= n_chunks) break;
      const std::int64_t b = c * chunk_size;
      const std::int64_t e = std::min(n_items, b + chunk_size);
      results[size_t(c)] = fn(c, b, e);
    }
  };
  if (workers == 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int i = 0; i < workers; ++i) pool.emplace_back(body);
    for (auto& t : pool) t.join();
  }
  return results;
}

}  // namespace renewalab
