#pragma once

#include <cstdint>

namespace swarmpath {

/// Counter-based generator: every draw is a pure function of
/// (seed, stream, tick, counter), so the order in which robots are evaluated
/// cannot change the numbers any one robot sees.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t tick)
      : key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ull) ^ mix(tick * 0x9e3779b97f4a7c15ull))) {}

  std::uint64_t next() { return mix(key_ + (++counter_) * 0xbf58476d1ce4e5b9ull); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(next() % span);
  }

  static constexpr std::uint64_t mix(std::uint64_t z) {
    // splitmix64 finalizer
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace swarmpath
