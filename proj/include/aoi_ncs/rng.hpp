#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace aoi_ncs {

// Stream derivation uses splitmix64 so that (master seed, purpose, index)
// maps to well-separated engine seeds. Purposes keep the transmission-time
// and plant-noise streams independent: changing the policy never perturbs
// the noise sequence, which enables paired policy comparisons.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

enum class StreamPurpose : std::uint64_t {
    Transmission = 1,
    PlantNoise = 2,
    Generic = 3,
};

inline std::uint64_t derive_seed(std::uint64_t master, StreamPurpose purpose, std::uint64_t index = 0) {
    std::uint64_t s = splitmix64(master);
    s = splitmix64(s ^ static_cast<std::uint64_t>(purpose));
    s = splitmix64(s ^ index);
    return s;
}

// Seedable random stream: mersenne twister (output sequence fixed by the
// standard) plus an explicit Box-Muller transform, so a given seed
// reproduces the identical draw sequence on every run.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(seed), seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double next_uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double next_gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        // u1 in (0, 1] so the log is finite.
        const double u1 = 1.0 - next_uniform();
        const double u2 = next_uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace aoi_ncs
