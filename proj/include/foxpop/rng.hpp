/*! @file rng.hpp
    @brief Seedable PCG64 stream, seed derivation and the few distributions
           the simulation needs.

    Every distribution here is implemented locally instead of using the
    <random> distribution templates, whose algorithms are unspecified by the
    standard. A given seed therefore yields the same draws with any standard
    library.
*/
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <utility>

namespace foxpop {

__extension__ using uint128 = unsigned __int128;

//! One step of the SplitMix64 finalizer; a bijection on 64-bit integers.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

//! Seed of run @p run_index in scenario @p scenario_index.
//! seed = splitmix64(splitmix64(splitmix64(base) ^ scenario) ^ run)
//! Depends only on its arguments, so results do not depend on scheduling.
constexpr std::uint64_t derive_seed(std::uint64_t base_seed,
                                    std::uint64_t scenario_index,
                                    std::uint64_t run_index) noexcept {
    return splitmix64(splitmix64(splitmix64(base_seed) ^ scenario_index) ^ run_index);
}

/*! @brief PCG-XSL-RR 128/64 (O'Neill's pcg64).

    128-bit LCG state, 64-bit output. Satisfies UniformRandomBitGenerator.
*/
class Pcg64 {
  public:
    using result_type = std::uint64_t;

    explicit Pcg64(std::uint64_t seed) noexcept {
        const std::uint64_t s0 = splitmix64(seed);
        const std::uint64_t s1 = splitmix64(s0);
        const std::uint64_t s2 = splitmix64(s1);
        const std::uint64_t s3 = splitmix64(s2);
        inc_ = ((u128(s2) << 64) | s3) | 1u;
        state_ = 0;
        step();
        state_ += (u128(s0) << 64) | s1;
        step();
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    result_type operator()() noexcept {
        step();
        const auto hi = static_cast<std::uint64_t>(state_ >> 64);
        const auto lo = static_cast<std::uint64_t>(state_);
        const unsigned rot = static_cast<unsigned>(state_ >> 122);
        const std::uint64_t x = hi ^ lo;
        return (x >> rot) | (x << ((64u - rot) & 63u));
    }

    friend bool operator==(const Pcg64&, const Pcg64&) = default;

  private:
    using u128 = uint128;
    static constexpr u128 kMultiplier =
        (u128(0x2360ED051FC65DA4ULL) << 64) | 0x4385DF649FCCF645ULL;

    void step() noexcept { state_ = state_ * kMultiplier + inc_; }

    u128 state_;
    u128 inc_;
};

using Rng = Pcg64;

//! Uniform real in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) noexcept {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

//! Uniform integer in [0, n). Lemire's multiply-shift with rejection. n > 0.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) noexcept {
    using u128 = uint128;
    u128 m = u128(rng()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
        const std::uint64_t threshold = (0 - n) % n;
        while (low < threshold) {
            m = u128(rng()) * n;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

//! Uniform integer in [lo, hi].
inline std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) noexcept {
    return lo + static_cast<std::int64_t>(
                    uniform_index(rng, static_cast<std::uint64_t>(hi - lo) + 1));
}

//! Always consumes one draw, so p = 0 and p = 1 keep the stream aligned.
inline bool bernoulli(Rng& rng, double p) noexcept { return uniform01(rng) < p; }

//! Box-Muller, cosine branch only; consumes two draws.
inline double normal(Rng& rng, double mean, double sd) noexcept {
    const double u1 = 1.0 - uniform01(rng);  // (0, 1]
    const double u2 = uniform01(rng);
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    return mean + sd * z;
}

//! Fisher-Yates.
template <class T>
void shuffle(std::span<T> items, Rng& rng) noexcept {
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_index(rng, i));
        using std::swap;
        swap(items[i - 1], items[j]);
    }
}

}  // namespace foxpop
