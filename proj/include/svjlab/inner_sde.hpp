#pragma once

#include <span>
#include <vector>

#include "svjlab/levy.hpp"
#include "svjlab/model.hpp"

namespace svj {

// One entry of the Z-increment ledger: dz is the effective increment of the
// underlying semimartingale (before the K(0) factor), booked at `time`.
struct LedgerEntry {
    double time = 0.0;
    double dz = 0.0;
};

struct InnerSolveConfig {
    int substeps = 1;
    double overflow_guard = 1e12;
};

// Noise covering one scheme interval: one Brownian (and, in exact mode, one
// stable) increment per substep; in thinned mode the jump events that fall
// inside the interval plus the compensating drift rate.
struct NoiseSlice {
    std::span<const double> brownian;
    std::span<const double> stable;           // empty in thinned mode
    std::span<const double> jump_times;       // thinned mode
    std::span<const double> jump_sizes;
    double compensator_drift = 0.0;
    DriverMode mode = DriverMode::ExactIncrement;
};

struct InnerResult {
    std::vector<double> states;      // state at each substep end
    std::vector<LedgerEntry> ledger; // effective dz entries within the interval
    double terminal = 0.0;           // last substep state (xi at t_{k+1}-)
    double min_prefloor = 0.0;       // most negative pre-floor state seen
    bool overflow = false;
};

// Full-truncation explicit stepping of the constant-kernel jump SDE on one
// interval [t_start, t_start + length): coefficients evaluated at x+, state
// floored at 0 after each substep, jumps applied at their exact event times.
InnerResult solve_inner(const ModelCoefficients& coeffs, double k0, double x_init, double t_start,
                        double length, const InnerSolveConfig& config, const NoiseSlice& noise);

}  // namespace svj
