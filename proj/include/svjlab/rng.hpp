#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace svj {

// SplitMix64 finalizer, used to derive well-separated per-path seeds from
// (master_seed, path_index) pairs.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t stream_index) {
    return splitmix64(master_seed ^ splitmix64(stream_index + 0x51ed270b7a4fca11ULL));
}

// Deterministic random stream. std::mt19937_64 is fully specified by the
// standard; distributions are hand-rolled so output is reproducible across
// standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform on (0,1), never returns 0 or 1.
    double uniform() {
        std::uint64_t bits = engine_() >> 11;  // 53 random bits
        double u = (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
        return u;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 2.0 * M_PI * u2;
        cached_ = r * std::sin(theta);
        have_cached_ = true;
        return r * std::cos(theta);
    }

    double exponential() { return -std::log(uniform()); }

    std::uint64_t next_u64() { return engine_(); }

private:
    std::mt19937_64 engine_;
    bool have_cached_ = false;
    double cached_ = 0.0;
};

}  // namespace svj
