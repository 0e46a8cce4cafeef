#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <thread>
#include <vector>

namespace dyadic {

/// Smallest index i in [0, count) with pred(i), scanning blocks of `block` indices
/// in rounds across `threads` workers. The answer does not depend on `threads`.
template <typename Pred>
std::optional<std::uint64_t> first_match(std::uint64_t count, unsigned threads, Pred&& pred,
                                         std::uint64_t block = 64) {
  if (threads <= 1) {
    for (std::uint64_t i = 0; i < count; ++i) {
      if (pred(i)) return i;
    }
    return std::nullopt;
  }
  for (std::uint64_t round_start = 0; round_start < count; round_start += block * threads) {
    std::vector<std::optional<std::uint64_t>> found(threads);
    std::vector<std::thread> workers;
    workers.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
      const std::uint64_t lo = round_start + w * block;
      const std::uint64_t hi = std::min(count, lo + block);
      workers.emplace_back([&, lo, hi, w] {
        for (std::uint64_t i = lo; i < hi; ++i) {
          if (pred(i)) {
            found[w] = i;
            return;
          }
        }
      });
    }
    for (auto& t : workers) t.join();
    for (const auto& f : found) {
      if (f) return f;
    }
  }
  return std::nullopt;
}

/// Runs fn(i) for i in [0, count) on `threads` workers with a static split.
template <typename Fn>
void parallel_for(std::uint64_t count, unsigned threads, Fn&& fn) {
  if (threads <= 1 || count < 2) {
    for (std::uint64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> workers;
  for (unsigned w = 0; w < threads; ++w) {
    workers.emplace_back([&, w] {
      for (std::uint64_t i = w; i < count; i += threads) fn(i);
    });
  }
  for (auto& t : workers) t.join();
}

/// Exponent visited at step i of the order 0, 1, -1, 2, -2, ...
inline std::int64_t signed_order_exponent(std::uint64_t i) {
  if (i == 0) return 0;
  const auto magnitude = static_cast<std::int64_t>((i + 1) / 2);
  return (i % 2 == 1) ? magnitude : -magnitude;
}

}  // namespace dyadic
