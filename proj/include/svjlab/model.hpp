#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace svj {

// Parameters of the affine (alpha-CIR) family:
//   mu(x) = a - kappa x, sigma(x) = sigma_bar sqrt(x+), gamma(x) = eta_bar sgn(x)|x|^{1/alpha}.
struct AffineParams {
    double a = 0.0;
    double kappa = 0.0;
    double sigma_bar = 0.0;
    double eta_bar = 0.0;
    double alpha = 1.5;
};

struct ModelCoefficients {
    std::function<double(double)> mu;
    std::function<double(double)> sigma;
    std::function<double(double)> gamma;
    double alpha = 1.5;  // stability exponent of the Levy driver
    std::optional<AffineParams> affine;
};

ModelCoefficients affine_coefficients(double a, double kappa, double sigma_bar, double eta_bar,
                                      double alpha);

struct AssumptionCheck {
    std::string name;
    bool pass = true;
    double worst_point = 0.0;
    double worst_value = 0.0;
};

struct AssumptionReport {
    bool pass = true;
    double growth_constant = 0.0;        // tightest L found on the grid
    double sqrt_holder_constant = 0.0;   // tightest L'_m found on sampled pairs
    std::vector<AssumptionCheck> checks;
};

// Numerically confirms the standing assumptions on a grid plus random pairs:
// sigma(0)=gamma(0)=0, mu(0)>=0, gamma non-decreasing, linear growth of
// |mu| + sigma^2 + |gamma|^alpha, and the local 1/2-Hoelder/Lipschitz bounds.
AssumptionReport validate_assumptions(const ModelCoefficients& coeffs,
                                      std::span<const double> x_grid, int pair_samples,
                                      std::uint64_t seed);

// Default validation grid: logarithmic spacing on [0, 10^3] plus negatives.
std::vector<double> default_validation_grid();

}  // namespace svj
