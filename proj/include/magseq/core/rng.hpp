#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace magseq {

// Finalizer of the splitmix64 generator (Steele, Lea & Flood).
inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Counter-based 64-bit generator: state advances by the golden-ratio
// increment, outputs pass through the splitmix64 finalizer. Streams for
// parallel work are derived from (base seed, stream index), so the draw
// sequence of one stream never depends on scheduling.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    static SplitMix64 stream(std::uint64_t base_seed, std::uint64_t stream_index) {
        return SplitMix64(mix64(base_seed + kGolden) ^
                          mix64((stream_index + 1) * 0xD1B54A32D192ED03ull));
    }

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += kGolden);
        return mix64(z);
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller; consumes exactly two uniforms per call.
    double gaussian() {
        const double u1 = 1.0 - uniform01(); // (0, 1], keeps the log finite
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    double gaussian(double mean, double stddev) { return mean + stddev * gaussian(); }

private:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
    std::uint64_t state_;
};

// Identifier stored in dataset headers; bump when the generator or the
// stream-derivation scheme changes.
inline constexpr std::uint32_t kRngId = 1; // splitmix64 + Box-Muller

} // namespace magseq
