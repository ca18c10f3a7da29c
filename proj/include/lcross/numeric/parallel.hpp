#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace lcross {

// Worker-count resolution: 0 means "ask the hardware".
inline unsigned resolve_workers(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

// Parallel loop over [0, n). Items are handed out in fixed-size chunks from an
// atomic counter, so each index is visited exactly once. fn(i) must only write
// to state owned by item i.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn, unsigned workers = 0,
                  std::size_t chunk = 64) {
  workers = resolve_workers(workers);
  if (n == 0) return;
  if (chunk == 0) chunk = 1;
  const std::size_t n_chunks = (n + chunk - 1) / chunk;
  if (workers <= 1 || n_chunks <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= n_chunks) return;
      const std::size_t lo = c * chunk;
      const std::size_t hi = lo + chunk < n ? lo + chunk : n;
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
}

// Deterministic parallel reduction: per-chunk partial sums are accumulated
// sequentially inside each fixed chunk and then combined in chunk-index order,
// so the floating-point grouping is identical for any worker count (including
// the sequential path).
template <class T, class Fn>
T chunked_sum(std::size_t n, Fn&& fn, unsigned workers = 0, std::size_t chunk = 64) {
  if (n == 0) return T{};
  if (chunk == 0) chunk = 1;
  const std::size_t n_chunks = (n + chunk - 1) / chunk;
  std::vector<T> partial(n_chunks, T{});
  auto fill = [&](std::size_t c) {
    const std::size_t lo = c * chunk;
    const std::size_t hi = lo + chunk < n ? lo + chunk : n;
    T acc{};
    for (std::size_t i = lo; i < hi; ++i) acc += fn(i);
    partial[c] = acc;
  };
  parallel_for(n_chunks, fill, workers, 1);
  T total{};
  for (std::size_t c = 0; c < n_chunks; ++c) total += partial[c];
  return total;
}

}  // namespace lcross
