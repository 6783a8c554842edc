// rng.hpp — counter-based random numbers for reproducible disorder ensembles.
//
// SplitMix64 run in counter mode: every draw is a pure function of
// (master_seed, stream, counter), so ensembles are order-independent,
// resumable, and bitwise identical for any worker count.

#pragma once

#include <cstdint>

namespace subrad {

namespace detail {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// SplitMix64 finalizer (Steele, Lea & Flood 2014).
inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace detail

class CounterRng {
public:
    CounterRng(std::uint64_t master_seed, std::uint64_t stream) noexcept
        : key_(detail::mix64(detail::mix64(master_seed + detail::kGolden) ^
                             (stream * 0xD2B74407B1CE6E93ull + 0x8BB84B93962EACC9ull))) {}

    std::uint64_t bits(std::uint64_t counter) const noexcept {
        return detail::mix64(key_ + (counter + 1) * detail::kGolden);
    }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01(std::uint64_t counter) const noexcept {
        return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
    }

    // Uniform on [-1, 1).
    double symmetric(std::uint64_t counter) const noexcept {
        return 2.0 * uniform01(counter) - 1.0;
    }

    std::uint64_t key() const noexcept { return key_; }

private:
    std::uint64_t key_;
};

}  // namespace subrad
