// Counter-based deterministic random streams: results depend only on
// (seed, index, draw counter), never on thread scheduling.

#ifndef BL_RNG_HPP
#define BL_RNG_HPP

#include <cstdint>

namespace bl {

struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    double uniform() { return double(next() >> 11) * 0x1.0p-53; } // [0,1)
};

// independent substream for one sample index
inline SplitMix64 substream(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 mix(seed ^ (0x9e3779b97f4a7c15ull * (index + 1)));
    mix.next();
    return mix;
}

} // namespace bl

#endif
