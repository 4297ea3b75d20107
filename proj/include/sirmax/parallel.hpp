#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace sirmax {

// Runs fn(lo, hi, slot) over disjoint contiguous blocks of [0, count).
// Work per index must be a pure function of the index (e.g. via
// Rng::stream), so results never depend on the worker count.  threads <= 0
// means hardware concurrency.  The first exception thrown by a block is
// rethrown after all workers join.
template <typename Fn>
void parallel_blocks(std::uint64_t count, int threads, Fn fn) {
  if (count == 0) return;
  std::uint64_t want = threads > 0 ? static_cast<std::uint64_t>(threads)
                                   : std::max(1u, std::thread::hardware_concurrency());
  std::uint64_t nblocks = std::min<std::uint64_t>(want, count);
  if (nblocks <= 1) {
    fn(std::uint64_t{0}, count, std::size_t{0});
    return;
  }

  std::vector<std::exception_ptr> errors(nblocks);
  std::vector<std::thread> pool;
  pool.reserve(nblocks);
  std::uint64_t chunk = count / nblocks, rem = count % nblocks, at = 0;
  for (std::uint64_t b = 0; b < nblocks; ++b) {
    std::uint64_t len = chunk + (b < rem ? 1 : 0);
    pool.emplace_back([&, b, lo = at, hi = at + len] {
      try {
        fn(lo, hi, static_cast<std::size_t>(b));
      } catch (...) {
        errors[b] = std::current_exception();
      }
    });
    at += len;
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace sirmax
