#include "svjlab/inner_sde.hpp"

#include <cmath>
#include <stdexcept>

namespace svj {

InnerResult solve_inner(const ModelCoefficients& coeffs, double k0, double x_init, double t_start,
                        double length, const InnerSolveConfig& config, const NoiseSlice& noise) {
    if (config.substeps < 1) throw std::invalid_argument("solve_inner: substeps >= 1 required");
    if (x_init < 0.0) throw std::invalid_argument("solve_inner: x_init >= 0 required");
    if (noise.brownian.size() != static_cast<std::size_t>(config.substeps))
        throw std::invalid_argument("solve_inner: noise slice does not cover the interval");

    InnerResult result;
    result.states.reserve(static_cast<std::size_t>(config.substeps));
    double h = length / config.substeps;
    double x = x_init;
    result.min_prefloor = x;
    std::size_t jump_cursor = 0;

    for (int j = 0; j < config.substeps; ++j) {
        double sub_left = t_start + j * h;
        double xp = x > 0.0 ? x : 0.0;
        double dz;
        if (noise.mode == DriverMode::ExactIncrement) {
            dz = coeffs.mu(xp) * h + coeffs.sigma(xp) * noise.brownian[static_cast<std::size_t>(j)] +
                 coeffs.gamma(xp) * noise.stable[static_cast<std::size_t>(j)];
        } else {
            dz = (coeffs.mu(xp) - coeffs.gamma(xp) * noise.compensator_drift) * h +
                 coeffs.sigma(xp) * noise.brownian[static_cast<std::size_t>(j)];
        }
        double xn = x + k0 * dz;
        if (xn < result.min_prefloor) result.min_prefloor = xn;
        if (xn < 0.0) xn = 0.0;
        result.ledger.push_back({sub_left, (xn - x) / k0});
        x = xn;

        if (noise.mode == DriverMode::Thinned) {
            double sub_right = sub_left + h;
            while (jump_cursor < noise.jump_times.size() &&
                   noise.jump_times[jump_cursor] <= sub_right) {
                double tau = noise.jump_times[jump_cursor];
                if (tau > sub_left) {
                    double before = x;
                    double jumped = x + k0 * coeffs.gamma(x > 0.0 ? x : 0.0) *
                                            noise.jump_sizes[jump_cursor];
                    if (jumped < result.min_prefloor) result.min_prefloor = jumped;
                    if (jumped < 0.0) jumped = 0.0;
                    result.ledger.push_back({tau, (jumped - before) / k0});
                    x = jumped;
                }
                ++jump_cursor;
            }
        }

        if (!std::isfinite(x) || std::abs(x) > config.overflow_guard) {
            result.overflow = true;
            break;
        }
        result.states.push_back(x);
    }
    result.terminal = x;
    return result;
}

}  // namespace svj
