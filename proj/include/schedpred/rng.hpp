#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace schedpred {

// Finalizer from splitmix64; used to derive independent stream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
}

// Deterministic stream key: (master seed, coordinate, trial) -> seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t s = mix64(master + 0x9e3779b97f4a7c15ull);
    s = mix64(s ^ (a + 0x9e3779b97f4a7c15ull));
    s = mix64(s ^ (b + 0x632be59bd9b4e019ull));
    return s;
}

// Seeded random stream. Wraps std::mt19937_64 (fully specified by the
// standard) and applies only hand-rolled transforms, so identical seeds
// produce bitwise-identical draws on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // Uniform strictly inside (0,1); never returns an endpoint.
    double uniform01() {
        return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    // Inverse-CDF exponential with the given mean; strictly positive.
    double exponential(double mean) { return -mean * std::log(uniform01()); }

    // Box-Muller standard normal.
    double gaussian() {
        double u1 = uniform01();
        double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    bool bernoulli(double p) { return uniform01() < p; }

    // Uniform integer in [0, bound), rejection sampled to avoid modulo bias.
    std::uint64_t integer(std::uint64_t bound) {
        std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            std::uint64_t r = gen_();
            if (r >= threshold) return r % bound;
        }
    }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[integer(i)]);
        }
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace schedpred
