#ifndef FPCONV_RNG_HPP
#define FPCONV_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>

namespace fpconv {

// Counter-based splittable generator: stream k of master seed s produces
// out_i = fmix64(base(s, k) + i * gamma). Streams are decorrelated by the
// finalizer, so parallel trials need no sequence coupling; identical
// (seed, stream) always reproduces the same draws.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) {
        base_ = fmix64(seed + 0x632BE59BD9B4E019ull) ^ fmix64(stream * kGamma + 0xD1B54A32D192ED03ull);
    }

    std::uint64_t next_u64() { return fmix64(base_ + (++counter_) * kGamma); }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller; pairs are cached, draw order is fixed.
    double next_gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1;
        do {
            u1 = next_double();
        } while (u1 <= 0.0);
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double th = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(th);
        has_spare_ = true;
        return r * std::cos(th);
    }

private:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

    static std::uint64_t fmix64(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t base_ = 0;
    std::uint64_t counter_ = 0;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace fpconv

#endif
