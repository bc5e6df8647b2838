#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <random>

namespace tpb {

// SplitMix64 finalizer. Used only for deriving seeds, never as a stream.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

// Seed of substream `index` under master seed `base`:
//   derive_seed(base, k) = mix64(mix64(base) + (k + 1) * golden_gamma)
// Distinct k give statistically unrelated seeds for the same base.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
    return mix64(mix64(base) + (index + 1) * kGoldenGamma);
}

// Folds one more 64-bit word into a running seed hash.
constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t word) noexcept {
    return mix64(seed ^ (mix64(word) + kGoldenGamma + (seed << 6) + (seed >> 2)));
}

inline std::uint64_t hash_combine(std::uint64_t seed, double value) noexcept {
    // +0.0 and -0.0 hash alike
    if (value == 0.0) value = 0.0;
    return hash_combine(seed, std::bit_cast<std::uint64_t>(value));
}

/// One reproducible stream of uniform variates.
///
/// Backed by std::mt19937_64, whose output sequence is fixed by the
/// standard. The conversion to [0,1) is done here (top 53 bits scaled by
/// 2^-53) rather than through std::uniform_real_distribution, whose output
/// is implementation-defined.
class RandomStream {
public:
    using engine_type = std::mt19937_64;

    explicit RandomStream(std::uint64_t seed = 0) : engine_(seed) {}

    // Uniform on [0, 1); consumes exactly one engine output.
    double uniform() noexcept {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform on [lo, hi); returns lo when lo == hi.
    double uniform(double lo, double hi) noexcept {
        const double u = uniform();
        double v = lo + (hi - lo) * u;
        if (v >= hi && hi > lo) v = std::nextafter(hi, lo);
        return v;
    }

    bool operator==(const RandomStream&) const = default;

private:
    engine_type engine_;
};

}  // namespace tpb
