#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace fracsob {

namespace detail {
inline std::atomic<int>& thread_cap() {
  static std::atomic<int> cap{1};
  return cap;
}
}  // namespace detail

inline void set_threads(int n) { detail::thread_cap() = std::max(1, n); }
inline int threads() { return detail::thread_cap(); }

// Work is split into a fixed number of chunks independent of the thread
// count, so per-chunk partial results combine in the same order always.
inline constexpr std::size_t kChunks = 64;

template <class Fn>
void for_each_chunk(std::size_t count, Fn&& fn) {
  const std::size_t chunks = std::min(kChunks, std::max<std::size_t>(count, 1));
  auto range = [&](std::size_t c) {
    return std::pair{count * c / chunks, count * (c + 1) / chunks};
  };
  const int workers = std::min<int>(threads(), static_cast<int>(chunks));
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) {
      auto [b, e] = range(c);
      fn(c, b, e);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t c; (c = next++) < chunks;) {
        auto [b, e] = range(c);
        fn(c, b, e);
      }
    });
  }
  for (auto& t : pool) t.join();
}

// Deterministic sum of term(k) over [0, count).
template <class Term>
double chunked_sum(std::size_t count, Term&& term) {
  std::vector<double> partial(kChunks, 0.0);
  for_each_chunk(count, [&](std::size_t c, std::size_t b, std::size_t e) {
    double acc = 0.0;
    for (std::size_t k = b; k < e; ++k) acc += term(k);
    partial[c] = acc;
  });
  double total = 0.0;
  for (double v : partial) total += v;
  return total;
}

}  // namespace fracsob
