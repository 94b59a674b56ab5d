#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>

namespace qlab {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Seeded deterministic generator (mt19937_64 core). All derived draws are
/// implemented here rather than with std distributions, so a given seed
/// produces the same stream on every platform.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    /// Independent substream for worker `stream` of a run seeded with `seed`.
    static Rng substream(uint64_t seed, uint64_t stream) {
        return Rng(splitmix64(seed + splitmix64(stream)));
    }

    uint64_t next() { return gen_(); }

    /// Unbiased uniform draw in [0, n), by rejection.
    uint64_t below(uint64_t n) {
        if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
        if ((n & (n - 1)) == 0) return next() & (n - 1);
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return x % n;
    }

    /// Uniform in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return unit() < p; }

private:
    std::mt19937_64 gen_;
};

} // namespace qlab
