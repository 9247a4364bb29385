#ifndef OTAFL_RNG_HPP
#define OTAFL_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <string_view>

namespace otafl {

/// splitmix64 finalizer, used both as a mixer and as a tiny PRNG step.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/**
 * Counter-based seeded stream built on xoshiro256++ with an explicit
 * Box-Muller normal generator. Avoids std::normal_distribution so that
 * the draw sequence is fixed by this code alone, not the standard
 * library implementation.
 */
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto& word : state_) word = splitmix64(s);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in (0, 1]; never returns 0 so log() is safe.
    double uniform_pos() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Uniform double in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n).
    std::uint64_t uniform_below(std::uint64_t n) {
        // rejection sampling to avoid modulo bias
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % n;
    }

    /// Standard normal via Box-Muller, one cached value per pair.
    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
        const double phi = 2.0 * M_PI * uniform();
        cached_ = r * std::sin(phi);
        has_cached_ = true;
        return r * std::cos(phi);
    }

    /// Circularly-symmetric complex Gaussian with E[|x|^2] = variance.
    std::complex<double> complex_normal(double variance) {
        const double s = std::sqrt(variance / 2.0);
        const double re = normal();
        const double im = normal();
        return {s * re, s * im};
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4]{};
    double cached_ = 0.0;
    bool has_cached_ = false;
};

/**
 * Expands one master seed into named independent streams. Stream identity
 * is (name, a, b, c), so e.g. the channel stream for (iteration, word) is
 * untouched by how many noise streams exist or which scenario runs.
 */
class SeedTree {
public:
    explicit SeedTree(std::uint64_t master_seed) : master_(master_seed) {}

    std::uint64_t master_seed() const { return master_; }

    RngStream stream(std::string_view name, std::uint64_t a = 0,
                     std::uint64_t b = 0, std::uint64_t c = 0) const {
        std::uint64_t h = master_;
        splitmix64(h);
        for (char ch : name) {
            h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(ch));
            splitmix64(h);
        }
        h ^= a; splitmix64(h);
        h ^= b; splitmix64(h);
        h ^= c;
        std::uint64_t final_state = h;
        return RngStream(splitmix64(final_state));
    }

private:
    std::uint64_t master_;
};

}  // namespace otafl

#endif  // OTAFL_RNG_HPP
