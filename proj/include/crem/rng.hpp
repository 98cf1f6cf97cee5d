#pragma once
// Counter-based RNG for reproducible parallel Monte Carlo. Philox2x64-10
// (Salmon et al., SC 2011): stateless block cipher over a 128-bit counter, so
// every (seed, replica, domain) triple names an independent stream and replica
// outputs do not depend on worker scheduling.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace crem {

namespace detail {

inline void mulhilo64(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
    __uint128_t p = static_cast<__uint128_t>(a) * b;
    hi = static_cast<std::uint64_t>(p >> 64);
    lo = static_cast<std::uint64_t>(p);
}

// One 128-bit block of Philox2x64-10.
inline void philox2x64(std::uint64_t key, std::uint64_t c0, std::uint64_t c1,
                       std::uint64_t& o0, std::uint64_t& o1) {
    constexpr std::uint64_t kMul = 0xD2B74407B1CE6E93ull;
    constexpr std::uint64_t kWeyl = 0x9E3779B97F4A7C15ull;
    for (int round = 0; round < 10; ++round) {
        std::uint64_t hi, lo;
        mulhilo64(kMul, c0, hi, lo);
        c0 = hi ^ key ^ c1;
        c1 = lo;
        key += kWeyl;
    }
    o0 = c0;
    o1 = c1;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

}  // namespace detail

// Stream domains: draws for distinct purposes never interleave, so adding or
// removing one sink cannot shift the draws of another.
enum class RngDomain : std::uint64_t {
    Tree = 0,      // waiting times and offspring counts
    Field = 1,     // Gaussian edge increments
    Sampling = 2,  // reservoir decisions
    Fixture = 3,   // test fixtures
};

class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t replica, RngDomain domain)
        : key_(detail::splitmix64(seed)),
          block_hi_((replica << 8) | static_cast<std::uint64_t>(domain)),
          block_lo_(0) {}

    std::uint64_t next_u64() {
        if (have_buffered_) {
            have_buffered_ = false;
            return buffered_;
        }
        std::uint64_t a, b;
        detail::philox2x64(key_, block_hi_, block_lo_++, a, b);
        buffered_ = b;
        have_buffered_ = true;
        return a;
    }

    // Uniform on (0,1]; never returns 0, so -log() is finite.
    double next_unit_open() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    // Uniform on [0,1).
    double next_unit_half() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double next_exponential() { return -std::log(next_unit_open()); }

    // Box-Muller pair; exactly one 128-bit block per call when aligned.
    void next_gaussian_pair(double& g0, double& g1) {
        double u1 = next_unit_open();
        double u2 = next_unit_half();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * std::numbers::pi * u2;
        g0 = r * std::cos(a);
        g1 = r * std::sin(a);
    }

    double next_gaussian() {
        double a, b;
        next_gaussian_pair(a, b);
        return a;
    }

private:
    std::uint64_t key_;
    std::uint64_t block_hi_;
    std::uint64_t block_lo_;
    std::uint64_t buffered_ = 0;
    bool have_buffered_ = false;
};

}  // namespace crem
