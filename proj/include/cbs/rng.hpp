#pragma once

// Counter-based random streams: every Monte-Carlo sample owns an independent
// generator derived from (seed, sample index), so results do not depend on
// how samples are distributed over workers.

#include <cstdint>
#include <cmath>

namespace cbs {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}
} // namespace detail

// xoshiro256++ seeded from a hash of (seed, stream index).
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t index)
    {
        std::uint64_t st = seed ^ (0x9E3779B97F4A7C15ULL * (index + 1));
        for (auto& word : s_)
            word = detail::splitmix64(st);
    }

    std::uint64_t next_u64()
    {
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

    // uniform in [0, 1)
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in (0, 1]; safe as a log argument
    double uniform_pos() { return double((next_u64() >> 11) + 1) * 0x1.0p-53; }

    double exponential() { return -std::log(uniform_pos()); }

    // isotropic unit vector
    void unit_vector(double& x, double& y, double& z)
    {
        z = 2.0 * uniform() - 1.0;
        const double phi = 2.0 * M_PI * uniform();
        const double r = std::sqrt(std::fmax(0.0, 1.0 - z * z));
        x = r * std::cos(phi);
        y = r * std::sin(phi);
    }

private:
    static std::uint64_t rotl(std::uint64_t v, int k)
    {
        return (v << k) | (v >> (64 - k));
    }
    std::uint64_t s_[4];
};

} // namespace cbs
