#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace sparseva {

// splitmix64 finalizer; used both as a bit mixer and to expand seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Derives an independent stream seed from a root seed and a path of indices.
// Every worker/realization/substream gets its own stream this way, so results
// do not depend on how work is partitioned.
inline std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = mix64(root);
    for (std::uint64_t p : path) s = mix64(s ^ mix64(p + 0x632BE59BD9B4E019ULL));
    return s;
}

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a) { return derive_seed(root, {a}); }

// xoshiro256++ (Blackman & Vigna). Fully specified, so streams are
// reproducible across platforms, unlike <random> distributions.
class Xoshiro256pp {
  public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        // expand the seed with splitmix64 as recommended by the authors
        std::uint64_t sm = seed;
        for (auto& w : state_) {
            sm += 0x9E3779B97F4A7C15ULL;
            w = mix64(sm);
        }
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // uniform on (0,1]; never returns 0 so it is safe under log()
    double uniform01() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

    // uniform on [0,1)
    double uniform01_halfopen() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // uniform integer in [lo, hi] via rejection (unbiased)
    std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) {
        const std::uint64_t span = hi - lo + 1;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return lo + x % span;
    }

  private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t state_[4];
};

// Standard-normal stream via the Box-Muller transform. The transform (not
// std::normal_distribution) keeps the draw sequence identical everywhere.
class GaussianStream {
  public:
    explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = rng_.uniform01();
        const double u2 = rng_.uniform01_halfopen();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    Xoshiro256pp& raw() { return rng_; }

  private:
    Xoshiro256pp rng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace sparseva
