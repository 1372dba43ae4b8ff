#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace quantmc {

/// Deterministic random source. The generator is std::mt19937_64 (fully
/// specified by the standard); every derived variate below is pinned here
/// rather than delegated to std::*_distribution, whose output is
/// implementation-defined. Identical seeds therefore give identical draws
/// on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform on [0,1) with 53-bit resolution.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform on the open interval (0,1).
    double uniform_open() {
        double u;
        do {
            u = uniform();
        } while (u <= 0.0);
        return u;
    }

    /// Standard normal via Box-Muller.
    double normal() {
        const double r = std::sqrt(-2.0 * std::log(uniform_open()));
        const double theta = 6.28318530717958647692 * uniform();
        return r * std::cos(theta);
    }

    /// Logistic(0,1) via the inverse CDF.
    double logistic() {
        const double u = uniform_open();
        return std::log(u / (1.0 - u));
    }

    bool bernoulli(double p) { return uniform() < p; }

    /// Uniform integer in [0, n), n >= 1. Rejection over the largest
    /// multiple of n, so the result is exactly uniform.
    std::uint64_t below(std::uint64_t n) {
        std::uint64_t x, r;
        do {
            x = gen_();
            r = x % n;
        } while (x - r > std::uint64_t(0) - n);
        return r;
    }

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace quantmc
