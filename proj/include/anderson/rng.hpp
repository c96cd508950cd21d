#pragma once

// Counter-based random streams.
//
// Every Monte Carlo trial draws from its own stream, keyed by
// seed_for_trial(base_seed, trial_index). A stream is Philox4x32-10 applied to
// an incrementing 64-bit block counter, so the value of draw k in a stream does
// not depend on which thread produced it or on any other stream.

#include <array>
#include <cstdint>
#include <limits>

namespace anderson {

/// Philox4x32 with 10 rounds (Salmon et al., SC'11). Pure function of
/// (counter, key).
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key) noexcept;

/// SplitMix64 finalizer. A bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Stream key for trial `trial` of an experiment seeded with `base_seed`.
///
/// key = mix64(mix64(base_seed) + 0x9E3779B97F4A7C15 * (trial + 1)).
/// For a fixed base seed the map is injective over all 64-bit trial indices:
/// multiplication by an odd constant, addition and mix64 are all bijections
/// modulo 2^64.
constexpr std::uint64_t seed_for_trial(std::uint64_t base_seed, std::uint64_t trial) noexcept {
    return mix64(mix64(base_seed) + 0x9E3779B97F4A7C15ULL * (trial + 1));
}

/// Uniform random bit generator over one counter-based stream.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t stream_key) noexcept : key_(stream_key) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept {
        return std::numeric_limits<result_type>::max();
    }

    result_type operator()() noexcept {
        if (cursor_ == 2) refill();
        return buffer_[cursor_++];
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// One fair sign, +1 or -1.
    int sign() noexcept {
        if (bits_left_ == 0) {
            bits_ = (*this)();
            bits_left_ = 64;
        }
        const int s = (bits_ & 1U) ? 1 : -1;
        bits_ >>= 1;
        --bits_left_;
        return s;
    }

    std::uint64_t key() const noexcept { return key_; }

private:
    void refill() noexcept;

    std::uint64_t key_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int cursor_ = 2;
    std::uint64_t bits_ = 0;
    int bits_left_ = 0;
};

}  // namespace anderson
