#pragma once

#include <cstdint>
#include <cmath>

#include "common.hpp"

namespace ewkit {

// Counter-based generator: the i-th output is a pure function of
// (seed, stream, i), so replays are identical across platforms and
// substreams can be handed to parallel replicates without coordination.
// The mixing function is the splitmix64 finalizer.
class CounterRng {
   public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix(seed ^ mix(stream ^ 0x9e3779b97f4a7c15ull))), counter_(0) {}

    std::uint64_t next_u64() {
        std::uint64_t z = key_ + 0x9e3779b97f4a7c15ull * ++counter_;
        return mix(z);
    }

    // Uniform on [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller; draws are consumed in pairs.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    Vec normal_vec(int d) {
        Vec v(d);
        for (int i = 0; i < d; ++i) v[i] = normal();
        return v;
    }

    // Uniform on the sphere of given radius.
    Vec sphere(int d, double radius = 1.0) {
        Vec v = normal_vec(d);
        double n = v.norm();
        while (n == 0.0) {
            v = normal_vec(d);
            n = v.norm();
        }
        return (radius / n) * v;
    }

    // Uniform in the closed ball of given radius.
    Vec ball(int d, double radius = 1.0) {
        Vec v = sphere(d, radius);
        return v * std::pow(uniform(), 1.0 / d);
    }

    int uniform_int(int n) {  // uniform on {0, ..., n-1}
        return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n));
    }

   private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ull;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t key_;
    std::uint64_t counter_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace ewkit
