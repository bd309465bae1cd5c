#ifndef BUDGETLAB_RNG_HPP
#define BUDGETLAB_RNG_HPP

// Portable random streams. Every stream is a std::mt19937_64 seeded with a
// child seed derived by splitmix64 from (parent seed, tag, index); all
// transforms to uniform, integer and Gaussian variates are implemented here
// so that results do not depend on the standard library in use.

#include <cmath>
#include <cstdint>
#include <random>

namespace budgetlab {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of the `index`-th child stream of kind `tag` under `seed`.
inline constexpr std::uint64_t child_seed(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(splitmix64(seed) ^ tag) ^ index);
}

namespace stream_tag {
inline constexpr std::uint64_t candidates = 0;
inline constexpr std::uint64_t voters = 1;
inline constexpr std::uint64_t experiment = 2;
inline constexpr std::uint64_t trial = 3;
}  // namespace stream_tag

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return double(next() >> 11) * 0x1.0p-53; }

    /// Uniform on {0, ..., bound - 1}; bound must be positive.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = ~std::uint64_t(0) - (~std::uint64_t(0) % bound);
        std::uint64_t x;
        do x = next();
        while (x >= limit);
        return x % bound;
    }

    /// Standard normal variate (Box-Muller, one value per call).
    double gaussian() {
        double u1;
        do u1 = uniform();
        while (u1 <= 0.0);
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace budgetlab

#endif  // BUDGETLAB_RNG_HPP
