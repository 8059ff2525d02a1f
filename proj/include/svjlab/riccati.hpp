#pragma once

#include <functional>
#include <vector>

#include "svjlab/kernels.hpp"
#include "svjlab/model.hpp"

namespace svj {

// Volterra-Riccati problem for the Laplace transform
// E[exp(u X_T + int_0^T f(T-s) X_s ds)] of the Volterra alpha-CIR process.
// u <= 0 and f <= 0 pointwise so the transform lies in (0, 1].
struct RiccatiProblem {
    double u = 0.0;
    std::function<double(double)> f;  // nonpositive, sampled on the psi grid
    AffineParams coeffs;
    const Kernel* kernel = nullptr;
    double horizon = 1.0;
    double step = 1e-3;  // h_psi
};

struct RiccatiSolution {
    std::vector<double> psi;  // grid values psi(i h), i = 0..n
    double step = 0.0;
    double max_residual = 0.0;
    bool converged = false;
    double blowup_time = -1.0;  // attained time on failure
    int max_iterations_used = 0;
};

// F(psi) = f - kappa psi + (sigma^2/2) psi^2 + (eta^alpha / cos(pi(2-alpha)/2)) |psi|^alpha.
double riccati_rhs(double psi, double f_val, const AffineParams& coeffs);

// Predictor-corrector Volterra quadrature on a uniform grid: trapezoid
// weights, left-rectangle predictor, fixed-point correction per node
// (tol 1e-10, 50 iteration cap). The residual check re-evaluates the
// equation at every node.
RiccatiSolution solve_psi(const RiccatiProblem& problem);

// Y0 = u X0 + X0 int_0^T F(psi) ds + a int_0^T psi ds, trapezoid quadrature;
// E[exp(u X_T + int f(T-s) X_s ds)] = exp(Y0).
double laplace_exponent(const RiccatiProblem& problem, const RiccatiSolution& solution, double x0);

struct McEstimate {
    double estimate = 0.0;
    double standard_error = 0.0;
};

// Mean and SE of exp(u Xhat_T + sum_j f(T - s_j) Xhat_{s_j} h) over paths,
// with Xhat sampled at fine times j h, j = 0..n.
McEstimate mc_laplace(const std::vector<std::vector<double>>& xhat_paths, double horizon, double u,
                      const std::function<double(double)>& f);

// The same reduction when the per-path exponents were accumulated elsewhere.
McEstimate mc_mean_se(const std::vector<double>& values);

// Per-path functional value exp(u x_T + sum f(T - s_j) x_j h).
double laplace_functional(const std::vector<double>& xhat, double horizon, double u,
                          const std::function<double(double)>& f);

}  // namespace svj
