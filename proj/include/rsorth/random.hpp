#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace rsorth {

/// Independent random streams. Every draw in the library is taken from a
/// generator seeded by derive_seed(seed, stream, index), so channel, noise and
/// initialization randomness can be replayed separately.
enum class Stream : std::uint64_t {
    Channel = 0x01,
    Noise = 0x02,
    Init = 0x03,
    RisInit = 0x04,
    Probe = 0x05,
    Trial = 0x06,
};

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30U)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27U)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31U);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, Stream stream, std::uint64_t index = 0) noexcept {
    return mix64(mix64(mix64(seed) ^ static_cast<std::uint64_t>(stream)) ^ index);
}

/// Portable generator: std::mt19937_64 is fully specified by the standard, and the
/// distributions below are written out by hand because the std:: ones are not.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11U) * 0x1.0p-53; }

    /// Standard normal via Box-Muller (both outputs used).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) {
            u1 = uniform();
        }
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    /// CN(0, 1): independent real and imaginary parts of variance 1/2.
    std::complex<double> complex_normal() {
        const double re = normal() * std::numbers::sqrt2 / 2.0;
        const double im = normal() * std::numbers::sqrt2 / 2.0;
        return {re, im};
    }

    /// Uniform phase in [0, 2*pi).
    double phase() { return 2.0 * std::numbers::pi * uniform(); }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace rsorth
