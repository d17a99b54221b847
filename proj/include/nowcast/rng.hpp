#pragma once

#include <cmath>
#include <cstdint>

#include "nowcast/errors.hpp"

namespace nowcast {

namespace detail {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// splitmix64 output function (Steele, Lea, Flood 2014).
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace detail

// One independent random stream. Streams are keyed by (seed, index, phase), so
// any simulation index can rebuild its own stream regardless of how work is
// split across threads. The generator is xoshiro256++ with splitmix64 seeding.
class RngStream {
  public:
    static constexpr std::uint64_t kPhaseDraw = 0;      // noise + posterior sampling
    static constexpr std::uint64_t kPhaseAllocate = 1;  // apportionment tie-breaks

    RngStream(std::uint64_t seed, std::uint64_t index, std::uint64_t phase) {
        std::uint64_t z = detail::mix64(seed + detail::kGolden);
        z = detail::mix64(z + (index + 1) * detail::kGolden);
        z = detail::mix64(z + (phase + 1) * detail::kGolden);
        for (auto& word : state_) {
            z += detail::kGolden;
            word = detail::mix64(z);
        }
    }

    std::uint64_t next_u64() {
        auto& s = state_;
        std::uint64_t result = detail::rotl(s[0] + s[3], 23) + s[0];
        std::uint64_t t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = detail::rotl(s[3], 45);
        return result;
    }

    // Uniform on [0, 1).
    double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Uniform integer on [0, n), n >= 1. Rejection keeps it unbiased.
    std::uint64_t next_below(std::uint64_t n) {
        std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    // Standard normal via Marsaglia's polar method (spare discarded).
    double normal() {
        for (;;) {
            double u = uniform(-1.0, 1.0);
            double v = uniform(-1.0, 1.0);
            double s = u * u + v * v;
            if (s > 0.0 && s < 1.0) {
                return u * std::sqrt(-2.0 * std::log(s) / s);
            }
        }
    }

    // Gamma(shape, 1) via Marsaglia-Tsang; shape < 1 boosted through
    // G(a) = G(a+1) * U^(1/a).
    double gamma(double shape) {
        if (!(shape > 0.0)) throw ValidationError("gamma shape must be positive");
        if (shape < 1.0) {
            double u = 1.0 - next_double();  // (0, 1]
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            double u = next_double();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

  private:
    std::uint64_t state_[4];
};

}  // namespace nowcast
