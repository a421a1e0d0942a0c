#pragma once

#include <cstdint>
#include <random>

namespace pliers {

/**
 * Seeded generator with a fully specified output stream.
 *
 * The engine is std::mt19937_64, whose sequence for a given seed is fixed by
 * the C++ standard. Standard distributions are implementation-defined, so
 * bounded integers and unit reals are derived here: `below` uses rejection
 * on the top of the 64-bit range, `unit` uses the high 53 bits.
 */
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). `bound` must be positive.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t x = engine_();
      if (x >= threshold) return x % bound;
    }
  }

  /// Uniform real in [0, 1).
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace pliers
