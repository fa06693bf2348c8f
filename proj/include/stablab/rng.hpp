#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace stablab {

// Counter-free splittable RNG built on the SplitMix64 mixer.
//
// A stream is identified by a 64-bit key; `split` derives a child stream
// whose output sequence is statistically independent of the parent's for any
// index. Experiments key one stream per path, so results are bit-identical
// no matter how paths are scheduled over threads.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : state_(mix(seed ^ 0x9e3779b97f4a7c15ull)) {}

    // Child stream for substream `index` (path id, worker id, ...).
    RngStream split(std::uint64_t index) const {
        return RngStream(mix(state_ + mix(index + 0x632be59bd9b4e019ull)));
    }

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform on (0,1); both endpoints excluded so logs and tangents are safe.
    double next_uniform() {
        const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
        return u > 0.0 ? u : 0x1.0p-53;
    }

    // Uniform on (lo, hi).
    double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_uniform(); }

    // Exponential with unit mean.
    double next_exponential() { return -std::log(next_uniform()); }

    // Standard normal (Box-Muller, one value per call; spare discarded to keep
    // the consumption pattern independent of call history).
    double next_normal() {
        const double r = std::sqrt(2.0 * next_exponential());
        return r * std::cos(6.283185307179586476925286766559 * next_uniform());
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

} // namespace stablab
