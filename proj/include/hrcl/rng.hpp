#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <string_view>

namespace hrcl {

/// SplitMix64 finalizer. Used to expand seeds and to derive substreams.
constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Mixes a base seed with a list of stream coordinates (agent, episode, period, ...).
/// The seed is first expanded with SplitMix64; the first coordinate (the agent id)
/// is XORed into the expanded seed, later coordinates are mixed in with SplitMix64.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> coords) noexcept;

/// xoshiro256** 1.0 (Blackman & Vigna), state expanded from a 64-bit seed with SplitMix64.
/// Satisfies UniformRandomBitGenerator. All derived samplers below are implemented
/// here rather than through <random> distributions so that streams are identical
/// across standard library implementations.
class Xoshiro256 {
public:
    using result_type = std::uint64_t;

    static constexpr std::string_view name = "xoshiro256**/splitmix64";

    explicit Xoshiro256(std::uint64_t seed = 0) noexcept { reseed(seed); }

    void reseed(std::uint64_t seed) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept;

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() noexcept;

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n) by rejection (no modulo bias). n must be > 0.
    std::uint64_t below(std::uint64_t n) noexcept;

    /// Standard normal via the Box-Muller transform; the second variate is cached.
    double normal() noexcept;

private:
    std::array<std::uint64_t, 4> s_{};
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace hrcl
