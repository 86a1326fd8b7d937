#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "hardrods/special_functions.hpp"

namespace hardrods {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// xoshiro256++ with splitmix64 seeding. replica_stream(master, i) derives one
// independent stream per replica so parallel runs stay reproducible.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    static Rng replica_stream(std::uint64_t master_seed, std::uint64_t replica_index) {
        std::uint64_t sm = master_seed;
        std::uint64_t a = splitmix64(sm);
        sm = a ^ (0xd1b54a32d192ed03ULL * (replica_index + 1));
        return Rng(splitmix64(sm));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // [0, 1)
    double uniform01() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // (0, 1)
    double uniform01_open() { return double(next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Inverse-CDF sampling keeps the draw count per variate fixed, which the
    // per-replica reproducibility tests rely on.
    double normal(double mean, double sd) { return mean + sd * normal_quantile(uniform01_open()); }

    double exponential(double rate) {
        if (rate <= 0.0) throw std::domain_error("exponential: rate must be positive");
        return -std::log1p(-uniform01()) / rate;
    }

    std::uint64_t poisson(double mean) {
        if (mean < 0.0) throw std::domain_error("poisson: mean must be nonnegative");
        if (mean == 0.0) return 0;
        return mean < 10.0 ? poisson_small(mean) : poisson_ptrs(mean);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t poisson_small(double mean) {
        const double limit = std::exp(-mean);
        std::uint64_t k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= uniform01();
        } while (p > limit);
        return k - 1;
    }

    // Hormann's PTRS transformed-rejection sampler, valid for mean >= 10.
    std::uint64_t poisson_ptrs(double mean) {
        const double b = 0.931 + 2.53 * std::sqrt(mean);
        const double a = -0.059 + 0.02483 * b;
        const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
        const double v_r = 0.9277 - 3.6224 / (b - 2.0);
        const double log_mean = std::log(mean);
        for (;;) {
            double u = uniform01() - 0.5;
            double v = uniform01();
            double us = 0.5 - std::abs(u);
            double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
            if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(k);
            if (k < 0.0 || (us < 0.013 && v > us)) continue;
            if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
                k * log_mean - mean - std::lgamma(k + 1.0))
                return static_cast<std::uint64_t>(k);
        }
    }

    std::uint64_t s_[4];
};

} // namespace hardrods
