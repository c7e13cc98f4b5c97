#pragma once

#include <cmath>
#include <cstdint>

namespace mvg {

// Counter-based generator: every draw is a pure function of
// (seed, stream, counter), so simulations are bit-reproducible regardless of
// path ordering or thread count. The mixer is the splitmix64 finalizer applied
// to a Weyl-combined key, which passes the usual empirical batteries for this
// kind of use.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(mix(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1)))) {}

    std::uint64_t next_u64() { return mix(key_ + 0xbf58476d1ce4e5b9ULL * (++ctr_)); }

    // Uniform on (0,1): top 53 bits, offset so 0 is never produced.
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; caches the second deviate.
    double next_gauss() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double u1 = next_uniform();
        const double u2 = next_uniform();
        const double rad = std::sqrt(-2.0 * std::log(u1));
        const double ang = 2.0 * M_PI * u2;
        cached_ = rad * std::sin(ang);
        have_cached_ = true;
        return rad * std::cos(ang);
    }

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t key_;
    std::uint64_t ctr_ = 0;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace mvg
