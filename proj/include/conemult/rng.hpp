#pragma once

#include <cmath>
#include <cstdint>

namespace conemult {

// Counter-based generator: every draw is a pure function of (seed, stream, counter),
// so parallel loops give the same numbers regardless of scheduling.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

    std::uint64_t bits(std::uint64_t counter) const { return mix(key_ + counter * 0x9e3779b97f4a7c15ULL); }

    // uniform in [0, 1)
    double uniform(std::uint64_t counter) const { return (bits(counter) >> 11) * 0x1.0p-53; }

    double normal(std::uint64_t counter) const {
        // separate counter range from uniform()
        double u1 = uniform((1ULL << 62) + 2 * counter);
        double u2 = uniform((1ULL << 62) + 2 * counter + 1);
        if (u1 <= 0) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    std::uint64_t key_;
};

// Sequential view of one counter stream.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream) : rng_(seed, stream) {}
    double uniform() { return rng_.uniform(next_++); }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    double normal() { return rng_.normal(next_++); }

private:
    CounterRng rng_;
    std::uint64_t next_ = 0;
};

} // namespace conemult
