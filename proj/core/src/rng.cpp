#include "pse/rng.hpp"

namespace pse {

std::uint64_t Xorshift64Star::next() noexcept
{
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545F4914F6CDD1DULL;
}

std::uint64_t Xorshift64Star::uniform(std::uint64_t bound) noexcept
{
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t r = next();
        if (r >= threshold) {
            return r % bound;
        }
    }
}

double Xorshift64Star::uniform_real() noexcept
{
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

}  // namespace pse
