#include "persist/rng.hpp"

#include <cmath>
#include <numbers>
#include <utility>

namespace persist {

std::uint64_t SplitMix64::below(std::uint64_t bound) {
    // Reject the top partial block so every residue is equally likely.
    const std::uint64_t limit = -bound % bound;
    for (;;) {
        const std::uint64_t r = next_u64();
        if (r >= limit) return r % bound;
    }
}

double SplitMix64::normal() {
    // 1 - u keeps the log argument in (0, 1].
    const double u1 = 1.0 - next_unit();
    const double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    SplitMix64 mix(seed);
    std::uint64_t h = mix.next_u64() ^ (stream * 0xd1b54a32d192ed03ULL);
    SplitMix64 mix2(h);
    h = mix2.next_u64() ^ (index * 0x8cb92ba72f3d8dd7ULL);
    return SplitMix64(h).next_u64();
}

void shuffle(std::span<std::size_t> values, SplitMix64& rng) {
    for (std::size_t i = values.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i));
        std::swap(values[i - 1], values[j]);
    }
}

} // namespace persist
