#pragma once

#include <cmath>
#include <cstdint>

namespace oatm {

// Deterministic splitmix64 generator. The standard library engines are
// portable but the <random> distributions are implementation-defined, and
// seeded runs must reproduce bit-exactly across platforms, so the few
// distributions we need are spelled out here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), exact (53-bit mantissa times a power of two).
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Unbiased integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }

    // Box-Muller; two draws per call, no cached spare.
    double gaussian() {
        const double u1 = static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;  // (0,1]
        const double u2 = static_cast<double>(next() >> 11) * 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

private:
    std::uint64_t state_;
};

inline std::uint64_t mix_bits(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Independent stream for (seed, stream_id); hash_round and the experiment
// runners derive their per-round / per-trial generators through this.
inline Rng substream(std::uint64_t seed, std::uint64_t stream_id) {
    const std::uint64_t a = mix_bits(seed + 0x9E3779B97F4A7C15ull);
    const std::uint64_t b = mix_bits(stream_id * 0xBF58476D1CE4E5B9ull + 0x94D049BB133111EBull);
    return Rng(a ^ b);
}

}  // namespace oatm
