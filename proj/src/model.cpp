#include "svjlab/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "svjlab/rng.hpp"

namespace svj {

ModelCoefficients affine_coefficients(double a, double kappa, double sigma_bar, double eta_bar,
                                      double alpha) {
    if (a < 0.0) throw std::invalid_argument("affine coefficients: a >= 0 required");
    if (sigma_bar < 0.0) throw std::invalid_argument("affine coefficients: sigma >= 0 required");
    if (eta_bar < 0.0) throw std::invalid_argument("affine coefficients: eta >= 0 required");
    if (!(alpha > 1.0 && alpha < 2.0))
        throw std::invalid_argument("affine coefficients: alpha in (1,2) required");

    ModelCoefficients c;
    c.alpha = alpha;
    c.affine = AffineParams{a, kappa, sigma_bar, eta_bar, alpha};
    c.mu = [a, kappa](double x) { return a - kappa * x; };
    c.sigma = [sigma_bar](double x) { return sigma_bar * std::sqrt(std::max(x, 0.0)); };
    double inv_alpha = 1.0 / alpha;
    c.gamma = [eta_bar, inv_alpha](double x) {
        if (x == 0.0) return 0.0;
        return eta_bar * (x > 0.0 ? 1.0 : -1.0) * std::pow(std::abs(x), inv_alpha);
    };
    return c;
}

std::vector<double> default_validation_grid() {
    std::vector<double> grid;
    grid.push_back(0.0);
    for (int i = 0; i <= 60; ++i) {
        double x = std::pow(10.0, -3.0 + 6.0 * i / 60.0);  // 1e-3 .. 1e3
        grid.push_back(x);
        grid.push_back(-x);
    }
    std::sort(grid.begin(), grid.end());
    return grid;
}

AssumptionReport validate_assumptions(const ModelCoefficients& coeffs,
                                      std::span<const double> x_grid, int pair_samples,
                                      std::uint64_t seed) {
    if (x_grid.empty()) throw std::invalid_argument("validate_assumptions: non-empty grid required");
    AssumptionReport report;
    const double tol = 1e-12;

    auto add_check = [&](std::string name, bool pass, double point, double value) {
        report.checks.push_back({std::move(name), pass, point, value});
        report.pass = report.pass && pass;
    };

    add_check("sigma(0)=0", std::abs(coeffs.sigma(0.0)) <= tol, 0.0, coeffs.sigma(0.0));
    add_check("gamma(0)=0", std::abs(coeffs.gamma(0.0)) <= tol, 0.0, coeffs.gamma(0.0));
    add_check("mu(0)>=0", coeffs.mu(0.0) >= -tol, 0.0, coeffs.mu(0.0));

    // Linear growth: |mu(x)| + sigma(x)^2 + |gamma(x)|^alpha <= L(1+|x|).
    double growth = 0.0, growth_point = 0.0;
    for (double x : x_grid) {
        double num = std::abs(coeffs.mu(x)) + coeffs.sigma(x) * coeffs.sigma(x) +
                     std::pow(std::abs(coeffs.gamma(x)), coeffs.alpha);
        double ratio = num / (1.0 + std::abs(x));
        if (ratio > growth) {
            growth = ratio;
            growth_point = x;
        }
    }
    report.growth_constant = growth;
    // With super-linear coefficients the ratio keeps climbing along the grid;
    // flag when the tail ratio dwarfs the ratio at moderate x.
    double mid_ratio = 0.0;
    for (double x : x_grid) {
        if (std::abs(x) > 10.0) continue;
        double num = std::abs(coeffs.mu(x)) + coeffs.sigma(x) * coeffs.sigma(x) +
                     std::pow(std::abs(coeffs.gamma(x)), coeffs.alpha);
        mid_ratio = std::max(mid_ratio, num / (1.0 + std::abs(x)));
    }
    bool growth_pass = growth <= 10.0 * std::max(mid_ratio, 1e-300);
    add_check("linear growth", growth_pass, growth_point, growth);

    // Monotonicity of gamma and local regularity on sampled pairs.
    Rng rng(seed);
    double holder = 0.0;
    bool monotone = true, regular = true;
    double mono_point = 0.0, reg_point = 0.0, reg_value = 0.0;
    const double box = 100.0;
    for (int i = 0; i < pair_samples; ++i) {
        double x = rng.uniform(-box, box);
        double y = rng.uniform(-box, box);
        if (x > y) std::swap(x, y);
        if (coeffs.gamma(x) > coeffs.gamma(y) + tol) {
            monotone = false;
            mono_point = x;
        }
        double dx = std::abs(x - y);
        if (dx < 1e-12) continue;
        double dmu = std::abs(coeffs.mu(x) - coeffs.mu(y));
        double dsig = coeffs.sigma(x) - coeffs.sigma(y);
        double dgam = coeffs.gamma(x) - coeffs.gamma(y);
        double lhs = dmu + dsig * dsig + dgam * dgam;
        double ratio = lhs / dx;
        holder = std::max(holder, ratio);
        // Local regularity fails when the ratio explodes as the pair tightens.
        if (dx < 1e-4 && ratio > 1e8) {
            regular = false;
            reg_point = x;
            reg_value = ratio;
        }
    }
    report.sqrt_holder_constant = holder;
    add_check("gamma non-decreasing", monotone, mono_point, 0.0);
    add_check("local 1/2-Hoelder/Lipschitz", regular, reg_point, reg_value);

    return report;
}

}  // namespace svj
