#include "svjlab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <stdexcept>

#include "svjlab/rng.hpp"

namespace svj {

double Kernel::eval(double t, int order) const {
    if (t < 0.0) throw std::invalid_argument("kernel eval: t must be >= 0");
    switch (order) {
        case 0: return value(t);
        case 1: return deriv1(t);
        case 2: return deriv2(t);
        default: throw std::invalid_argument("kernel eval: order must be 0, 1 or 2");
    }
}

double Kernel::max_value(double horizon) const {
    const int n = 2048;
    double m = 0.0;
    for (int i = 0; i <= n; ++i) m = std::max(m, value(horizon * i / n));
    return m;
}

double Kernel::max_abs_deriv1(double horizon) const {
    const int n = 2048;
    double m = 0.0;
    for (int i = 0; i <= n; ++i) m = std::max(m, std::abs(deriv1(horizon * i / n)));
    return m;
}

double Kernel::total_abs_deriv2(double horizon) const {
    const int n = 4096;
    double h = horizon / n;
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
        acc += 0.5 * h * (std::abs(deriv2(i * h)) + std::abs(deriv2((i + 1) * h)));
    return acc;
}

ExpSumKernel::ExpSumKernel(std::vector<double> weights, std::vector<double> rates)
    : weights_(std::move(weights)), rates_(std::move(rates)) {
    if (weights_.empty() || weights_.size() != rates_.size())
        throw std::invalid_argument("expsum kernel: need n >= 1 matching weights and rates");
    std::set<double> distinct;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        if (!(weights_[i] > 0.0)) throw std::invalid_argument("expsum kernel: weights must be > 0");
        if (rates_[i] < 0.0) throw std::invalid_argument("expsum kernel: rates must be >= 0");
        if (!distinct.insert(rates_[i]).second)
            throw std::invalid_argument("expsum kernel: rates must be distinct");
    }
}

double ExpSumKernel::value(double t) const {
    double s = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) s += weights_[i] * std::exp(-rates_[i] * t);
    return s;
}

double ExpSumKernel::deriv1(double t) const {
    double s = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i)
        s -= weights_[i] * rates_[i] * std::exp(-rates_[i] * t);
    return s;
}

double ExpSumKernel::deriv2(double t) const {
    double s = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i)
        s += weights_[i] * rates_[i] * rates_[i] * std::exp(-rates_[i] * t);
    return s;
}

double ExpSumKernel::max_value(double) const { return value(0.0); }

double ExpSumKernel::max_abs_deriv1(double) const { return -deriv1(0.0); }

double ExpSumKernel::total_abs_deriv2(double horizon) const {
    // K'' >= 0, so the integral is K'(T) - K'(0).
    return deriv1(horizon) - deriv1(0.0);
}

SampledKernel::SampledKernel(std::vector<double> times, std::vector<double> values)
    : times_(std::move(times)), values_(std::move(values)) {
    if (times_.size() < 2 || times_.size() != values_.size())
        throw std::invalid_argument("sampled kernel: need >= 2 matching times and values");
    if (times_.front() != 0.0) throw std::invalid_argument("sampled kernel: times must start at 0");
    for (std::size_t i = 1; i < times_.size(); ++i)
        if (!(times_[i] > times_[i - 1]))
            throw std::invalid_argument("sampled kernel: times must be strictly increasing");
}

double SampledKernel::value(double t) const {
    if (t >= times_.back()) return values_.back();
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    std::size_t i = static_cast<std::size_t>(it - times_.begin());
    if (i == 0) return values_.front();
    double w = (t - times_[i - 1]) / (times_[i] - times_[i - 1]);
    return values_[i - 1] + w * (values_[i] - values_[i - 1]);
}

double SampledKernel::deriv1(double t) const {
    double h = 1e-6 * std::max(1.0, times_.back());
    double lo = std::max(0.0, t - h);
    return (value(t + h) - value(lo)) / (t + h - lo);
}

double SampledKernel::deriv2(double t) const {
    double h = 1e-4 * std::max(1.0, times_.back());
    double tm = std::max(0.0, t - h);
    return (value(t + h) - 2.0 * value(t) + value(tm)) / (h * h);
}

double modulus_bound(const Kernel& kernel, double horizon, double delta) {
    if (!(delta > 0.0) || delta > horizon)
        throw std::invalid_argument("modulus_bound: need 0 < delta <= T");
    // Verification grid for the true modulus.
    const int n = 1000;
    double w_grid = 0.0;
    double hi = horizon - delta;
    for (int i = 0; i <= n; ++i) {
        double s = hi * i / n;
        w_grid = std::max(w_grid, std::abs(kernel.value(s) - kernel.value(s + delta)));
    }
    double head = kernel.value(0.0) - kernel.value(delta);
    if (head >= w_grid) return head;
    return std::max(head, kernel.max_abs_deriv1(horizon) * delta);
}

CmReport check_complete_monotonicity(const Kernel& kernel, double horizon, int max_order,
                                     int grid_size) {
    if (max_order < 1) throw std::invalid_argument("check_complete_monotonicity: max_order >= 1");
    if (grid_size < max_order + 2) grid_size = max_order + 2;
    CmReport report;
    report.horizon = horizon;
    report.max_order = max_order;
    report.grid_size = grid_size;

    double h = horizon / grid_size;
    std::vector<double> samples(static_cast<std::size_t>(grid_size) + 1);
    for (int i = 0; i <= grid_size; ++i) samples[static_cast<std::size_t>(i)] = kernel.value(i * h);

    double k0 = kernel.value(0.0);
    std::vector<double> diff = samples;
    for (int order = 1; order <= max_order; ++order) {
        for (std::size_t i = 0; i + 1 < diff.size(); ++i) diff[i] = diff[i + 1] - diff[i];
        diff.pop_back();
        // Rounding in a k-th forward difference grows like 2^k eps * max|K|.
        double tol = std::ldexp(1.0, order) * 1e3 * std::numeric_limits<double>::epsilon() *
                     std::max(1.0, k0);
        double sign = (order % 2 == 0) ? 1.0 : -1.0;
        for (std::size_t i = 0; i < diff.size(); ++i) {
            double signed_diff = sign * diff[i];
            if (signed_diff < -tol) {
                report.pass = false;
                report.violations.push_back({order, static_cast<double>(i) * h, signed_diff});
                break;  // first violation per order is enough
            }
        }
    }
    return report;
}

namespace {

// Recombined function value x(t) = sum_m x_m 1_{t_m <= t} K(t - t_m).
double recombined(const Kernel& kernel, const std::vector<double>& times,
                  const std::vector<double>& coeffs, double t) {
    double s = 0.0;
    for (std::size_t m = 0; m < times.size(); ++m)
        if (times[m] <= t) s += coeffs[m] * kernel.value(t - times[m]);
    return s;
}

}  // namespace

bool verify_certificate(const Kernel& kernel, const NonNegCertificate& cert) {
    if (cert.times.empty() || cert.times.size() != cert.coeffs.size()) return false;
    double tol = nonneg_tol(kernel);
    for (std::size_t m = 0; m < cert.times.size(); ++m) {
        if (m > 0 && !(cert.times[m] > cert.times[m - 1])) return false;
        double partial = 0.0;
        for (std::size_t j = 0; j <= m; ++j)
            partial += cert.coeffs[j] * kernel.value(cert.times[m] - cert.times[j]);
        if (partial < -tol) return false;
    }
    double v = recombined(kernel, cert.times, cert.coeffs, cert.violation_time);
    return v < -tol && std::abs(v - cert.violation_value) <= 1e-9 * (1.0 + std::abs(v));
}

std::optional<NonNegCertificate> search_nonneg_counterexample(const Kernel& kernel, int num_points,
                                                              double horizon, int trials,
                                                              std::uint64_t seed) {
    if (num_points < 1 || trials < 1)
        throw std::invalid_argument("search_nonneg_counterexample: M >= 1 and trials >= 1");
    double tol = nonneg_tol(kernel);
    double k0 = kernel.value(0.0);
    Rng rng(seed);
    const int scan_points = 400;

    for (int trial = 0; trial < trials; ++trial) {
        // Sorted grid 0 <= t_1 < ... < t_M <= T.
        std::vector<double> times(static_cast<std::size_t>(num_points));
        for (auto& t : times) t = rng.uniform(0.0, horizon);
        std::sort(times.begin(), times.end());
        bool distinct = true;
        for (std::size_t i = 1; i < times.size(); ++i)
            if (!(times[i] > times[i - 1])) distinct = false;
        if (!distinct) continue;

        // Greedy coefficients: keep every partial sum in [0, slack].
        std::vector<double> coeffs(times.size());
        double slack = rng.uniform(0.05, 1.0) * k0;
        bool feasible = true;
        for (std::size_t m = 0; m < times.size(); ++m) {
            double base = 0.0;
            for (std::size_t j = 0; j < m; ++j)
                base += coeffs[j] * kernel.value(times[m] - times[j]);
            // partial sum at t_m is base + x_m K(0); draw x_m so it lands in [0, slack].
            double lo = -base / k0;
            double hi = (slack - base) / k0;
            if (!(hi >= lo)) {
                feasible = false;
                break;
            }
            coeffs[m] = rng.uniform(lo, hi);
        }
        if (!feasible) continue;

        // Scan a fine grid past the last constraint time for a dip below zero.
        double best_t = 0.0, best_v = 0.0;
        for (int i = 0; i <= scan_points; ++i) {
            double t = times.front() + (2.0 * horizon - times.front()) * i / scan_points;
            double v = recombined(kernel, times, coeffs, t);
            if (v < best_v) {
                best_v = v;
                best_t = t;
            }
        }
        if (best_v < -tol) {
            NonNegCertificate cert{times, coeffs, best_t, best_v};
            if (verify_certificate(kernel, cert)) return cert;
        }
    }
    return std::nullopt;
}

}  // namespace svj
