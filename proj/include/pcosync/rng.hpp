// Deterministic splittable RNG. Every randomized routine takes an explicit
// stream so results are reproducible bit-for-bit at any worker count: streams
// are derived from (master seed, purpose tag, index), never shared across
// work items.
#pragma once

#include <cstdint>

namespace pcosync {

// SplitMix64: 64-bit state, golden-ratio increment, avalanching output mix.
// Passes standard statistical batteries and splits cleanly by construction.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1), 53 random bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform double in [lo, hi).
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    bool bernoulli(double p) {
        return uniform01() < p;
    }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Multiply-shift rejection-free mapping; bias < 2^-64, irrelevant here.
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

  private:
    std::uint64_t state_;
};

// Derives an independent substream from a master seed and up to three salts.
// Feeding the mixed seed through one SplitMix64 step decorrelates adjacent
// indices before they become stream states themselves.
inline SplitMix64 derive_stream(std::uint64_t master, std::uint64_t salt_a,
                                std::uint64_t salt_b = 0, std::uint64_t salt_c = 0) {
    SplitMix64 mixer(master ^ (salt_a * 0x9e3779b97f4a7c15ULL)
                            ^ (salt_b * 0xc2b2ae3d27d4eb4fULL)
                            ^ (salt_c * 0x165667b19e3779f9ULL));
    return SplitMix64(mixer.next_u64());
}

}  // namespace pcosync
