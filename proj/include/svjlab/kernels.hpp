#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace svj {

// Convolution kernel K : R+ -> R+, non-increasing with 0 < K(0) < +inf and
// two derivatives available. Values are immutable after construction, so all
// accessors are safe for concurrent use.
class Kernel {
public:
    virtual ~Kernel() = default;

    virtual double value(double t) const = 0;
    virtual double deriv1(double t) const = 0;
    virtual double deriv2(double t) const = 0;

    // Horizon-restricted norms: max_[0,T] K, max_[0,T] |K'|, int_0^T |K''|.
    virtual double max_value(double horizon) const;
    virtual double max_abs_deriv1(double horizon) const;
    virtual double total_abs_deriv2(double horizon) const;

    // order in {0,1,2}; rejects t < 0.
    double eval(double t, int order) const;
};

// K(t) = sum_i w_i exp(-lambda_i t), w_i > 0, lambda_i >= 0 distinct.
// Completely monotone by construction (discrete Bernstein measure).
class ExpSumKernel final : public Kernel {
public:
    ExpSumKernel(std::vector<double> weights, std::vector<double> rates);

    double value(double t) const override;
    double deriv1(double t) const override;
    double deriv2(double t) const override;
    double max_value(double horizon) const override;
    double max_abs_deriv1(double horizon) const override;
    double total_abs_deriv2(double horizon) const override;

    const std::vector<double>& weights() const { return weights_; }
    const std::vector<double>& rates() const { return rates_; }
    std::size_t size() const { return weights_.size(); }

private:
    std::vector<double> weights_;
    std::vector<double> rates_;
};

// Piecewise-linear interpolant of sampled kernel values. Admissible in the
// checkers only, not in the scheme.
class SampledKernel final : public Kernel {
public:
    SampledKernel(std::vector<double> times, std::vector<double> values);

    double value(double t) const override;
    double deriv1(double t) const override;
    double deriv2(double t) const override;

    double horizon() const { return times_.back(); }

private:
    std::vector<double> times_;
    std::vector<double> values_;
};

// Rounding guard for exact non-negativity properties.
inline double nonneg_tol(const Kernel& kernel) { return 1e-12 * (1.0 + kernel.value(0.0)); }

// Upper bound for the modulus of continuity w_{K,T}(delta); dominates every
// sampled increment |K(s)-K(s')| with |s-s'| <= delta on a verification grid.
double modulus_bound(const Kernel& kernel, double horizon, double delta);

struct CmViolation {
    int order = 0;
    double time = 0.0;
    double value = 0.0;  // signed forward difference (-1)^k Delta^k, < -tol
};

struct CmReport {
    bool pass = true;
    double horizon = 0.0;
    int max_order = 0;
    int grid_size = 0;
    std::vector<CmViolation> violations;
};

// Checks (-1)^k Delta_h^k K >= -tol on a uniform grid for k = 1..max_order.
CmReport check_complete_monotonicity(const Kernel& kernel, double horizon, int max_order,
                                     int grid_size);

// A genuine counterexample to the non-negativity preservation property:
// all partial sums sum_{j<=m} x_j K(t_m - t_j) are >= 0, yet the recombined
// function dips below zero at violation_time.
struct NonNegCertificate {
    std::vector<double> times;
    std::vector<double> coeffs;
    double violation_time = 0.0;
    double violation_value = 0.0;
};

// Recomputes the certificate from scratch; true iff it is valid for `kernel`.
bool verify_certificate(const Kernel& kernel, const NonNegCertificate& cert);

// Randomized greedy search for a certificate with M grid points on [0, T].
std::optional<NonNegCertificate> search_nonneg_counterexample(const Kernel& kernel, int num_points,
                                                              double horizon, int trials,
                                                              std::uint64_t seed);

}  // namespace svj
