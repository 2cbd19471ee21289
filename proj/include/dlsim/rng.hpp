#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace dlsim {

// Distinct deterministic sub-streams derived from one experiment seed, so
// e.g. workload generation and perturbation traces never share draws.
enum class RngStream : std::uint64_t {
    Workload = 0x11,
    Availability = 0x22,
    Bandwidth = 0x33,
    Latency = 0x44,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// mt19937_64 output is pinned by the standard; all value mapping is done
// locally instead of via std::*_distribution, whose sequences vary between
// standard library implementations. Identical seeds replay identically
// everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    static Rng for_stream(std::uint64_t seed, RngStream stream) {
        return Rng(splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(stream)));
    }

    std::uint64_t next_u64() { return eng_(); }

    // Open interval (0,1); never returns 0 or 1, so log() is always finite.
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    double exponential(double mean) { return -mean * std::log(uniform01()); }

    double normal(double mu, double sigma) {
        if (have_spare_) {
            have_spare_ = false;
            return mu + sigma * spare_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return mu + sigma * r * std::cos(a);
    }

    // Marsaglia-Tsang; shape < 1 handled by the usual boost draw.
    double gamma(double shape, double scale) {
        if (shape < 1.0) {
            const double u = uniform01();
            return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = 0.0;
            double v = 0.0;
            do {
                x = normal(0.0, 1.0);
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform01();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
        }
    }

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace dlsim
