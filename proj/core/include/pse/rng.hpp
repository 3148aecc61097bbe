#pragma once

#include <cstdint>

namespace pse {

/// xorshift64* generator used wherever reproducible sampling is needed.
///
/// State update (all arithmetic mod 2^64):
///   x ^= x >> 12;  x ^= x << 25;  x ^= x >> 27;
///   output = x * 0x2545F4914F6CDD1D
/// The state is the seed itself. Zero is a fixed point of the shift
/// sequence, so seed 0 is replaced by 0x9E3779B97F4A7C15.
class Xorshift64Star {
  public:
    static constexpr std::uint64_t kZeroSeedReplacement = 0x9E3779B97F4A7C15ULL;

    explicit Xorshift64Star(std::uint64_t seed) noexcept
        : state_(seed == 0 ? kZeroSeedReplacement : seed)
    {}

    std::uint64_t next() noexcept;

    /// Uniform integer in [0, bound). Draws r = next() until
    /// r >= (2^64 - bound) % bound, then returns r % bound. bound must be > 0.
    std::uint64_t uniform(std::uint64_t bound) noexcept;

    /// Uniform double in [0, 1) from the top 53 bits of next().
    double uniform_real() noexcept;

  private:
    std::uint64_t state_;
};

}  // namespace pse
