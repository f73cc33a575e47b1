#pragma once

#include <cstdint>
#include <span>

namespace persist {

// SplitMix64 (Steele, Lea & Flood 2014). Chosen because the whole algorithm is
// three lines and yields identical streams on every platform, which
// std::mt19937 + std::uniform_*_distribution do not guarantee.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Upper 53 bits mapped to [0, 1).
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    /// Unbiased integer in [0, bound) by rejection; bound must be > 0.
    std::uint64_t below(std::uint64_t bound);

    /// Standard normal via Box-Muller; consumes two draws per call.
    double normal();

private:
    std::uint64_t state_;
};

/// Mixes a base seed with a stream tag and an index into an independent seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0);

/// Stream tags for derive_seed.
namespace streams {
inline constexpr std::uint64_t kInit = 1;
inline constexpr std::uint64_t kSchedule = 2;
inline constexpr std::uint64_t kSplit = 3;
inline constexpr std::uint64_t kBlobs = 4;
} // namespace streams

/// Fisher-Yates shuffle driven by SplitMix64 (portable, unlike std::shuffle).
void shuffle(std::span<std::size_t> values, SplitMix64& rng);

} // namespace persist
