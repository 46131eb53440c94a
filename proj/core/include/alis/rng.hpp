#pragma once

#include <cstdint>
#include <random>

namespace alis {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; derives independent stream seeds from (seed, stream) pairs so results do
// not depend on the order streams are consumed in.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Counter-based SplitMix64 engine. Cheap to construct, used for per-trial Monte Carlo streams.
class SplitMix64 {
public:
    using result_type = std::uint64_t;
    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}
    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }
    constexpr result_type operator()() noexcept {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream) { return Rng(mix_seed(seed, stream)); }

// Uniform double in [0, 1) from the top 53 bits; identical across standard libraries.
template <class Urbg>
double uniform01(Urbg& rng) {
    static_assert(Urbg::min() == 0 && Urbg::max() == ~std::uint64_t{0});
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace alis
