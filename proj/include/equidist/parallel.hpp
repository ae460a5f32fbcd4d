#pragma once

// Deterministic chunked parallelism.
//
// Work units [0, total) are split into fixed-size chunks; chunks are handed to
// worker threads, each chunk produces a value, and values are reduced in chunk
// order on the calling thread.  Because the chunk boundaries and the merge
// order are fixed, results are bit-identical for every thread count.

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace equidist {

inline unsigned default_thread_count() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

// fn(begin, end) -> T computed sequentially inside one chunk.
// merge(acc, T, chunk_index) folds results in ascending chunk order.
template <typename T, typename Fn, typename Merge>
void parallel_chunks(std::size_t total, std::size_t chunk_size,
                     unsigned threads, Fn fn, Merge merge) {
  if (chunk_size == 0) chunk_size = 1;
  std::size_t n_chunks = (total + chunk_size - 1) / chunk_size;
  std::vector<T> results(n_chunks);
  if (threads <= 1 || n_chunks <= 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) {
      std::size_t b = c * chunk_size;
      std::size_t e = b + chunk_size < total ? b + chunk_size : total;
      results[c] = fn(b, e);
    }
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (;;) {
        std::size_t c = next.fetch_add(1);
        if (c >= n_chunks) return;
        std::size_t b = c * chunk_size;
        std::size_t e = b + chunk_size < total ? b + chunk_size : total;
        results[c] = fn(b, e);
      }
    };
    unsigned use = threads < n_chunks ? threads : static_cast<unsigned>(n_chunks);
    std::vector<std::thread> pool;
    pool.reserve(use);
    for (unsigned t = 0; t < use; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (std::size_t c = 0; c < n_chunks; ++c) merge(results[c], c);
}

}  // namespace equidist
