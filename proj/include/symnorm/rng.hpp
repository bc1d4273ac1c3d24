#pragma once

#include <cstdint>

namespace symnorm {

// SplitMix64 step: advances the state and returns a well-mixed 64-bit word.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Deterministic generator with a fixed cross-platform output sequence.
// Standard-library distributions are implementation-defined, so every draw
// used in seeded corpora or Monte Carlo goes through this type instead.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {
        // decorrelate trivially related seeds (0, 1, 2, ...)
        splitmix64_next(state_);
        splitmix64_next(state_);
    }

    // Derives an independent stream for item `index` of a seeded family.
    static Rng for_index(std::uint64_t seed, std::uint64_t index) {
        std::uint64_t s = seed ^ (0xD1B54A32D192ED03ULL * (index + 1));
        return Rng(s);
    }

    std::uint64_t next_u64() { return splitmix64_next(state_); }

    // uniform in [0, 1) with 53 random bits
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n)
    std::uint64_t uniform_int(std::uint64_t n) {
        // multiply-shift; bias is < 2^-64 * n, irrelevant at corpus sizes
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

private:
    std::uint64_t state_;
};

}  // namespace symnorm
