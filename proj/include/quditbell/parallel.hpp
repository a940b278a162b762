#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace quditbell {

inline unsigned default_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Splits [0, count) into at most `threads` contiguous chunks and calls
// fn(chunk_index, begin, end) for each. Returns the number of chunks.
// Exceptions thrown by a worker are rethrown on the caller's thread.
template <class Fn>
std::size_t parallel_chunks(std::size_t count, unsigned threads, Fn&& fn) {
  if (count == 0) return 0;
  const std::size_t chunks = std::clamp<std::size_t>(threads, 1, count);
  const std::size_t base = count / chunks;
  const std::size_t extra = count % chunks;
  auto bounds = [&](std::size_t c) {
    const std::size_t begin = c * base + std::min(c, extra);
    return std::pair{begin, begin + base + (c < extra ? 1 : 0)};
  };
  if (chunks == 1) {
    fn(std::size_t{0}, std::size_t{0}, count);
    return 1;
  }

  std::vector<std::exception_ptr> errors(chunks);
  {
    std::vector<std::jthread> pool;
    pool.reserve(chunks);
    for (std::size_t c = 0; c < chunks; ++c) {
      pool.emplace_back([&, c] {
        try {
          const auto [begin, end] = bounds(c);
          fn(c, begin, end);
        } catch (...) {
          errors[c] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return chunks;
}

}  // namespace quditbell
