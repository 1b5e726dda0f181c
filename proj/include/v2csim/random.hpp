#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace v2csim {

// splitmix64, used both as a seed expander and for deriving per-run seeds
// from a master seed. Stable across platforms.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t s = master ^ (0x9e3779b97f4a7c15ULL * (index + 1));
    return splitmix64(s);
}

// Deterministic random stream (xoshiro256**). All samplers are implemented
// here rather than via std::distributions so that sequences are bit-exact
// regardless of standard library.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform in (0, 1); never returns 0 so log() is safe
    double uniform() {
        const std::uint64_t bits = next_u64() >> 11;  // 53 bits
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double exponential(double rate) {
        if (rate <= 0.0) throw std::invalid_argument("exponential: rate must be > 0");
        return -std::log(uniform()) / rate;
    }

    double normal(double mean, double stddev) {
        // Box-Muller, one value per pair of uniforms
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(2.0 * M_PI * u2);
    }

    // normal truncated at zero by rejection
    double truncated_normal(double mean, double stddev) {
        for (;;) {
            const double x = normal(mean, stddev);
            if (x >= 0.0) return x;
        }
    }

    // Marsaglia-Tsang for shape >= 1, boosted for shape < 1
    double gamma(double shape, double scale) {
        if (shape <= 0.0 || scale <= 0.0)
            throw std::invalid_argument("gamma: shape and scale must be > 0");
        if (shape < 1.0) {
            const double u = uniform();
            return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal(0.0, 1.0);
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
        }
    }

    double rayleigh(double sigma) {
        if (sigma <= 0.0) throw std::invalid_argument("rayleigh: sigma must be > 0");
        return sigma * std::sqrt(-2.0 * std::log(uniform()));
    }

    // Nakagami(m, omega): sqrt of Gamma(m, omega/m)
    double nakagami(double m, double omega) {
        if (m < 0.5 || omega <= 0.0)
            throw std::invalid_argument("nakagami: require m >= 0.5, omega > 0");
        return std::sqrt(gamma(m, omega / m));
    }

    bool bernoulli(double p) { return uniform() < p; }

    // Knuth's method; fine for the small per-step means used here
    int poisson(double mean) {
        if (mean < 0.0) throw std::invalid_argument("poisson: mean must be >= 0");
        if (mean == 0.0) return 0;
        const double limit = std::exp(-mean);
        int k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= uniform();
        } while (p > limit);
        return k - 1;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
};

}  // namespace v2csim
