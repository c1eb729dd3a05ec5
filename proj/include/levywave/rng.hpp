#ifndef LEVYWAVE_RNG_HPP
#define LEVYWAVE_RNG_HPP

#include <cstdint>
#include <random>

namespace levywave {

using Rng = std::mt19937_64;

// splitmix64; used only to spread (seed, stream index) pairs into well
// separated engine seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent stream for path/run `index` under a master seed. Streams are
// reproducible regardless of which thread consumes them.
inline Rng make_stream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = splitmix64(seed);
    s = splitmix64(s ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
    return Rng(s);
}

} // namespace levywave

#endif
