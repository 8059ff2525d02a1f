#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "svjlab/kernels.hpp"
#include "svjlab/levy.hpp"
#include "svjlab/model.hpp"
#include "svjlab/scheme.hpp"

namespace svj {

// Smooth approximation phi of |x| built from a density psi supported on
// [eps/delta, eps] with psi(x) <= 2/(x log delta) and unit integral. The
// density is the 2/(x log delta) envelope times a trapezoidal taper in log
// scale (linear ramps over the outer 5% of the support, plateau inside).
class YwFunction {
public:
    YwFunction(double delta, double eps);

    double density(double x) const;        // psi_{delta,eps}, closed form
    double cumulative(double y) const;     // int_{eps/delta}^{y} psi, closed form
    double phi(double x) const;            // cached-table double integral
    double phi_deriv1(double x) const;     // sign(x) * cumulative(|x|)
    double phi_deriv2(double x) const;     // density(|x|)

    double delta() const { return delta_; }
    double eps() const { return eps_; }
    double plateau() const { return plateau_; }

private:
    double delta_;
    double eps_;
    double log_delta_;
    double ramp_;     // taper ramp width in log scale
    double plateau_;  // taper plateau height, solved so the integral is 1
    std::vector<double> table_y_;    // log-uniform grid over the support
    std::vector<double> table_phi_;  // phi at the grid points
};

YwFunction build_yw(double delta, double eps);

struct YwInequalityReport {
    int samples = 0;
    int violations = 0;
    double worst_slack = 0.0;  // most negative margin seen
    bool pass() const { return violations == 0; }
};

// Checks |x| <= eps + phi(x), |phi'| <= 1 and phi'' = psi(|x|) <= 2/(|x| log delta)
// at random points; zero violations allowed beyond 1e-9 slack.
YwInequalityReport verify_yw_inequalities(const YwFunction& yw, int samples, std::uint64_t seed);

// Checks the two jump-comparison inequalities with h(x,y,u) = u(gamma(x)-gamma(y))
// and f(u) = C_m u, C_m the sampled 1/2-Hoelder constant of gamma on the box.
YwInequalityReport verify_yw_lemmas(const YwFunction& yw, const ModelCoefficients& coeffs, double c,
                                    int samples, std::uint64_t seed);

struct L1Distance {
    double value = 0.0;        // sup over times of mean |A - B|
    int argmax_index = 0;      // index of the sup-attaining time
    double standard_error = 0.0;  // SE of the mean at the sup-attaining time
};

// Paired-sample sup-L1 distance between two path bundles (paths x times).
L1Distance l1_distance(const std::vector<std::vector<double>>& paths_a,
                       const std::vector<std::vector<double>>& paths_b);

struct ConvergenceRow {
    int intervals = 0;              // N
    double d_xi_xhat = 0.0;         // sup_t mean |xi - Xhat|
    double d_xhat_xbar = 0.0;       // sup_t mean |Xhat - Xbar|
    double d_xbar_cauchy = 0.0;     // sup_t mean |Xbar^{2N} - Xbar^N|
    double d_xbar_cauchy_se = 0.0;
    double sup_moment = 0.0;        // sup_t mean xi
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    int flagged_paths = 0;
    int n_paths = 0;
    std::uint64_t master_seed = 0;
    bool cauchy_nonincreasing = true;  // within 2 SE, consecutive rows
};

struct ConvergenceConfig {
    std::vector<int> n_list;  // ascending; finest noise grid is 2*max(N)*n_sub
    int substeps = 16;
    double horizon = 1.0;
    double x0 = 1.0;
    int n_paths = 1000;
    std::uint64_t master_seed = 0;
    int threads = 0;
    StableDriverParams driver;
};

ConvergenceTable convergence_study(const Kernel& kernel, const ModelCoefficients& coeffs,
                                   const ConvergenceConfig& config);

}  // namespace svj
