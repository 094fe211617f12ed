#pragma once

#include "tossfuse/common.hpp"

#include <cmath>
#include <cstdint>
#include <random>

namespace tossfuse {

// Deterministic random stream. Distribution sampling is written out by hand
// (std::uniform_real_distribution and friends are implementation-defined, which
// would break reproducibility across standard libraries).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // Derive an independent child stream; splitmix64 of (seed, tag).
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t tag) {
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (tag + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller (cached spare).
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    Vec3 uniform_in_box(const Vec3& lo, const Vec3& hi) {
        return {uniform(lo.x(), hi.x()), uniform(lo.y(), hi.y()), uniform(lo.z(), hi.z())};
    }

    // Uniform direction on the unit sphere.
    Vec3 unit_vector() {
        const double z = uniform(-1.0, 1.0);
        const double a = uniform(0.0, 2.0 * M_PI);
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        return {r * std::cos(a), r * std::sin(a), z};
    }

    // Uniform random rotation (Shoemake).
    Quat unit_quaternion() {
        const double u1 = uniform(), u2 = uniform(), u3 = uniform();
        const double s1 = std::sqrt(1.0 - u1), s2 = std::sqrt(u1);
        return Quat(s1 * std::sin(2.0 * M_PI * u2), s1 * std::cos(2.0 * M_PI * u2),
                    s2 * std::sin(2.0 * M_PI * u3), s2 * std::cos(2.0 * M_PI * u3))
            .normalized();
    }

    std::uint64_t raw() { return eng_(); }

private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace tossfuse
