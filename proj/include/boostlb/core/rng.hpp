// rng.hpp
//
// Counter-based and sequential random number generation.  Everything random in
// the library is a pure function of a 64-bit key and a counter, so hypotheses,
// samples and trials can be regenerated on any thread in any order.
#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace boostlb {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

/// SplitMix64 finalizer (Stafford variant 13).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Per-stream constant of counter_bits; hoist it out of loops over one stream.
constexpr std::uint64_t stream_base(std::uint64_t key) noexcept { return mix64(key ^ 0x6a09e667f3bcc909ull); }

constexpr std::uint64_t counter_bits_from_base(std::uint64_t base, std::uint64_t counter) noexcept {
    return mix64(base + (counter + 1) * kGolden);
}

/// 64 random bits at position `counter` of the stream identified by `key`.
constexpr std::uint64_t counter_bits(std::uint64_t key, std::uint64_t counter) noexcept {
    return counter_bits_from_base(stream_base(key), counter);
}

/// Splits a parent seed into a child seed identified by a list of tags.
/// Distinct tag paths give statistically independent children.
constexpr std::uint64_t derive_seed(std::uint64_t parent,
                                    std::initializer_list<std::uint64_t> tags) noexcept {
    std::uint64_t s = mix64(parent + kGolden);
    for (std::uint64_t t : tags) s = mix64(s ^ mix64(t + 0x3c6ef372fe94f82bull));
    return s;
}

/// Sequential SplitMix64 engine.  Satisfies UniformRandomBitGenerator.
class SplitMix64 {
  public:
    using result_type = std::uint64_t;

    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept {
        return std::numeric_limits<result_type>::max();
    }

    constexpr result_type operator()() noexcept { return mix64(state_ += kGolden); }

  private:
    std::uint64_t state_;
};

/// Uniform integer in [0, bound) by Lemire's multiply-shift rejection method.
/// Implemented here (instead of std::uniform_int_distribution) so that draws
/// are identical across standard library implementations.
template <class Engine>
std::uint64_t uniform_below(Engine& eng, std::uint64_t bound) {
    std::uint64_t x = eng();
    unsigned __int128 prod = static_cast<unsigned __int128>(x) * bound;
    auto low = static_cast<std::uint64_t>(prod);
    if (low < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            x = eng();
            prod = static_cast<unsigned __int128>(x) * bound;
            low = static_cast<std::uint64_t>(prod);
        }
    }
    return static_cast<std::uint64_t>(prod >> 64);
}

/// Uniform double in [0, 1) with 53 random bits.
template <class Engine>
double uniform01(Engine& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

}  // namespace boostlb
