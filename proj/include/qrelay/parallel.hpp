#pragma once

#include <algorithm>
#include <cstdint>
#include <thread>
#include <vector>

#include "qrelay/rng.hpp"

namespace qrelay {

// Splits [0, count) into contiguous chunks, evaluates `body(i, acc)` for every
// index and merges the per-chunk accumulators in chunk order. Callers keep
// accumulators integral so the merged value is independent of the split.
template <class Acc, class Body>
Acc parallel_accumulate(std::uint64_t count, Body body, unsigned threads = worker_threads()) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::uint64_t>(count, 1))));
  std::vector<Acc> partial(threads);
  auto run = [&](unsigned t) {
    const std::uint64_t begin = count * t / threads;
    const std::uint64_t end = count * (t + 1) / threads;
    for (std::uint64_t i = begin; i < end; ++i) body(i, partial[t]);
  };
  if (threads == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(run, t);
    for (auto& th : pool) th.join();
  }
  Acc total{};
  for (const auto& p : partial) total += p;
  return total;
}

}  // namespace qrelay
