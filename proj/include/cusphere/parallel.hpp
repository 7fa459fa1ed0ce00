#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace cusphere {

/// Runs body(begin, end) over [0, n) split into contiguous chunks, one per
/// worker. Each index is visited by exactly one call, so any body that writes
/// only to its own indices produces results independent of `workers`.
template <typename Body>
void parallel_for(std::size_t n, int workers, Body&& body) {
  const std::size_t w = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), 1, std::max<std::size_t>(n, 1));
  if (w == 1 || n < 2048) {
    body(std::size_t{0}, n);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(w - 1);
  const std::size_t chunk = (n + w - 1) / w;
  for (std::size_t t = 1; t < w; ++t) {
    const std::size_t b = t * chunk, e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&body, b, e] { body(b, e); });
  }
  body(std::size_t{0}, std::min(n, chunk));
}

}  // namespace cusphere
