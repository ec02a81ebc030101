#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace tailbound {

// 64-bit finalizer used to derive per-chunk seeds from (base_seed, chunk
// index). The derivation is part of the report contract: chunk k of a run
// seeded with s always sees the stream seeded with mix_seed(s, k).
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t base_seed, std::uint64_t chunk_index) {
    return splitmix64(base_seed ^ splitmix64(chunk_index + 1));
}

// Deterministic random stream. Normal deviates use Box-Muller on top of
// 53-bit uniforms so the byte stream depends only on the seed, not on the
// standard library's distribution implementations.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on (0, 1]; never returns 0 so log() below is safe.
    double uniform() {
        const std::uint64_t bits = engine_() >> 11;  // 53 bits
        return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    // Unbiased +/-1.
    double rademacher() { return (engine_() >> 63) ? 1.0 : -1.0; }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace tailbound
