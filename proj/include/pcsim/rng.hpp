#ifndef PCSIM_RNG_HPP
#define PCSIM_RNG_HPP

#include <cstdint>

namespace pcsim {

// Counter-based hashing RNG (splitmix64 finalizer). Every draw is a pure
// function of (seed, step, cell, salt), so a parallel sweep over cells
// produces the same numbers as a serial one.
inline std::uint64_t hash_mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t step,
                                  std::uint64_t cell, std::uint64_t salt = 0) {
    std::uint64_t h = hash_mix(seed ^ 0x8f1bbcdcbfa53e0bull);
    h = hash_mix(h ^ step);
    h = hash_mix(h ^ (cell * 0xd1342543de82ef95ull));
    return hash_mix(h ^ salt);
}

// Uniform draw in [0, 1).
inline double uniform01(std::uint64_t seed, std::uint64_t step,
                        std::uint64_t cell, std::uint64_t salt = 0) {
    return static_cast<double>(counter_hash(seed, step, cell, salt) >> 11) * 0x1.0p-53;
}

} // namespace pcsim

#endif
