#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace asimm {

/// Counter-based random stream. Output i depends only on (key, i), so
/// streams keyed by (seed, replicate, subject, observation) can be drawn
/// in any order, from any thread, with identical results.
class CounterRng {
 public:
  explicit CounterRng(std::initializer_list<std::uint64_t> key_parts) {
    for (std::uint64_t p : key_parts) key_ = mix(key_ ^ (p + 0x9e3779b97f4a7c15ULL));
  }

  std::uint64_t next_u64() {
    counter_ += 0x9e3779b97f4a7c15ULL;
    return mix(key_ + counter_);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  /// Exponential with the given rate, via inversion.
  double exponential(double rate) { return -std::log1p(-next_double()) / rate; }

 private:
  // SplitMix64 finalizer.
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t key_ = 0x6a09e667f3bcc908ULL;
  std::uint64_t counter_ = 0;
};

}  // namespace asimm
