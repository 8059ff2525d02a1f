#pragma once

#include <cstdint>
#include <vector>

#include "svjlab/rng.hpp"

namespace svj {

enum class DriverMode { ExactIncrement, Thinned };

// Spectrally positive compensated alpha-stable driver, alpha in (1,2).
struct StableDriverParams {
    double alpha = 1.5;
    double jump_threshold = 0.1;  // epsilon_J, thinned mode only
    DriverMode mode = DriverMode::ExactIncrement;
};

// int_0^inf (u ^ u^2) nu(du) = 1/(2-alpha) + 1/(alpha-1) for nu(du) = u^{-1-alpha} du.
double compensator_mass(double alpha);

// One draw of L_{t+dt} - L_t where log E[e^{u L_t}] = t |u|^alpha / cos(pi(2-alpha)/2)
// for u <= 0 (Chambers-Mallows-Stuck, totally skewed, scaled by dt^{1/alpha}).
double sample_stable_increment(const StableDriverParams& params, double dt, Rng& rng);

// Jumps of size >= epsilon_J on [0, T] plus the compensating drift rate
// int_{eps}^inf u nu(du) = eps^{1-alpha}/(alpha-1).
struct JumpStream {
    std::vector<double> times;  // strictly increasing
    std::vector<double> sizes;  // >= epsilon_J
    double compensator_drift = 0.0;
};

JumpStream sample_large_jumps(const StableDriverParams& params, double horizon, Rng& rng);

struct FineGrid {
    double horizon = 1.0;
    int steps = 1;
    double dt() const { return horizon / steps; }
};

// Per-path noise, a pure function of (master_seed, path_index, grid, params).
struct DriverNoise {
    std::uint64_t seed = 0;
    DriverMode mode = DriverMode::ExactIncrement;
    std::vector<double> brownian;  // N(0, dt) increments, one per fine step
    std::vector<double> stable;    // exact-increment mode, one per fine step
    JumpStream jumps;              // thinned mode
    double horizon = 1.0;
};

DriverNoise derive_path_noise(std::uint64_t master_seed, std::uint64_t path_index,
                              const FineGrid& grid, const StableDriverParams& params);

// Block-sums a fine noise onto a coarser grid (steps / factor); jump events
// are shared verbatim. Couples runs across N on one probability space.
DriverNoise aggregate_noise(const DriverNoise& fine, int factor);

}  // namespace svj
