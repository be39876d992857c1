#ifndef ARSR_RNG_HPP
#define ARSR_RNG_HPP

#include <cstdint>

namespace arsr {

// splitmix64: tiny, well-mixed, identical on every platform. Used wherever
// reproducibility from a seed is part of the contract.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, n)
    std::uint64_t below(std::uint64_t n) { return n ? next() % n : 0; }

    // uniform in [-range, +range)
    float uniform(float range) {
        const double u = static_cast<double>(next() >> 11) * 0x1.0p-53;  // [0,1)
        return static_cast<float>(range * (2.0 * u - 1.0));
    }
};

} // namespace arsr

#endif
