#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace corrdet {

/// SplitMix64: a tiny splittable generator. Every (seed, n, trial) triple
/// gets its own stream, so results do not depend on how trials are split
/// across threads.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t state) : state_(state) {}

    std::uint64_t next()
    {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform on the open interval (0, 1).
    double uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

    /// Standard normal by Box-Muller; the second variate is cached.
    double normal()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double phi = 2.0 * std::numbers::pi * uniform();
        spare_ = r * std::sin(phi);
        has_spare_ = true;
        return r * std::cos(phi);
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Stream key for one simulated trial.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t n, std::uint64_t trial)
{
    SplitMix64 mix(seed);
    std::uint64_t h = mix.next();
    h = SplitMix64(h ^ n).next();
    return SplitMix64(h ^ (trial * 0xd1b54a32d192ed03ULL)).next();
}

}  // namespace corrdet
