#pragma once

#include <cstdint>

namespace qrelay {

// Counter-based generator keyed by (seed, stream). Every Monte Carlo trial
// draws from its own stream, so results do not depend on how trials are
// scheduled across threads.
class CounterRng {
public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
      : key_{mix(seed ^ mix(stream + 0x9e3779b97f4a7c15ULL))} {}

  std::uint64_t next() noexcept { return mix(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  int bit() noexcept { return static_cast<int>(next() >> 63); }

  static std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Worker count for trial-parallel loops; honours QRELAY_THREADS when set.
unsigned worker_threads();

}  // namespace qrelay
