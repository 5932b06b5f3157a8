#ifndef DMT_RNG_HPP
#define DMT_RNG_HPP

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace dmt {

// splitmix64 finalizer — used to derive independent stream seeds from
// (master seed, path...) so every frame / noise draw / probe owns its own
// generator and outputs stay byte-identical for a given master seed.
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t derive_seed(uint64_t seed, std::initializer_list<uint64_t> path) {
    uint64_t s = splitmix64(seed);
    for (uint64_t p : path) s = splitmix64(s ^ p);
    return s;
}

// mt19937_64 wrapper with explicit uniform/gaussian transforms.
// std::normal_distribution is implementation-defined, so Box-Muller is done
// by hand to keep outputs stable across toolchains.
struct Rng {
    explicit Rng(uint64_t seed) : eng(seed) {}

    uint64_t raw() { return eng(); }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }

    // standard normal, Box-Muller with cached second deviate
    double gauss() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 <= 0.0) u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // label with m uniform bits
    uint32_t bits(int m) { return static_cast<uint32_t>(eng() & ((1ULL << m) - 1ULL)); }

  private:
    std::mt19937_64 eng;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace dmt

#endif // DMT_RNG_HPP
