#include "svjlab/riccati.hpp"

#include <cmath>
#include <stdexcept>

namespace svj {

namespace {
double jump_coeff(const AffineParams& c) {
    // cos(pi(2-alpha)/2) > 0 on alpha in (1,2).
    return std::pow(c.eta_bar, c.alpha) / std::cos(0.5 * M_PI * (2.0 - c.alpha));
}
}  // namespace

double riccati_rhs(double psi, double f_val, const AffineParams& coeffs) {
    if (!(coeffs.alpha > 1.0 && coeffs.alpha < 2.0))
        throw std::invalid_argument("riccati_rhs: alpha in (1,2) required");
    return f_val - coeffs.kappa * psi + 0.5 * coeffs.sigma_bar * coeffs.sigma_bar * psi * psi +
           jump_coeff(coeffs) * std::pow(std::abs(psi), coeffs.alpha);
}

RiccatiSolution solve_psi(const RiccatiProblem& problem) {
    if (!problem.kernel) throw std::invalid_argument("solve_psi: kernel required");
    if (problem.u > 0.0) throw std::invalid_argument("solve_psi: u <= 0 required");
    if (!(problem.step > 0.0 && problem.horizon > 0.0))
        throw std::invalid_argument("solve_psi: positive step and horizon required");

    const Kernel& kernel = *problem.kernel;
    const double h = problem.step;
    const int n = static_cast<int>(std::llround(problem.horizon / h));
    const double guard = 1e6;
    const double fp_tol = 1e-10;
    const int fp_cap = 50;

    RiccatiSolution sol;
    sol.step = h;
    sol.psi.assign(static_cast<std::size_t>(n) + 1, 0.0);

    std::vector<double> f_vals(static_cast<std::size_t>(n) + 1, 0.0);
    if (problem.f)
        for (int i = 0; i <= n; ++i) f_vals[static_cast<std::size_t>(i)] = problem.f(i * h);
    for (double fv : f_vals)
        if (fv > 0.0) throw std::invalid_argument("solve_psi: f <= 0 required");

    std::vector<double> rhs_vals(static_cast<std::size_t>(n) + 1, 0.0);
    sol.psi[0] = problem.u * kernel.value(0.0);
    rhs_vals[0] = riccati_rhs(sol.psi[0], f_vals[0], problem.coeffs);

    const double k0 = kernel.value(0.0);
    for (int i = 1; i <= n; ++i) {
        double t_i = i * h;
        // History part of the trapezoid sum (nodes 0..i-1; node 0 at half weight).
        double history = 0.5 * kernel.value(t_i) * rhs_vals[0];
        for (int j = 1; j < i; ++j)
            history += kernel.value(t_i - j * h) * rhs_vals[static_cast<std::size_t>(j)];
        double base = problem.u * kernel.value(t_i) + h * history;

        // Left-rectangle predictor, then fixed-point correction on the
        // implicit half-weight node i term.
        double psi = problem.u * kernel.value(t_i) +
                     h * (history + 0.5 * rhs_vals[static_cast<std::size_t>(i - 1)] * k0);
        int iter = 0;
        for (; iter < fp_cap; ++iter) {
            double next = base + 0.5 * h * k0 * riccati_rhs(psi, f_vals[static_cast<std::size_t>(i)],
                                                            problem.coeffs);
            double change = std::abs(next - psi);
            psi = next;
            if (change <= fp_tol) break;
        }
        sol.max_iterations_used = std::max(sol.max_iterations_used, iter + 1);
        if (iter >= fp_cap || !std::isfinite(psi) || std::abs(psi) > guard) {
            sol.converged = false;
            sol.blowup_time = t_i;
            sol.psi.resize(static_cast<std::size_t>(i));
            return sol;
        }
        sol.psi[static_cast<std::size_t>(i)] = psi;
        rhs_vals[static_cast<std::size_t>(i)] = riccati_rhs(psi, f_vals[static_cast<std::size_t>(i)],
                                                            problem.coeffs);
    }

    // Residual check: re-evaluate the Volterra equation at every node.
    for (int i = 0; i <= n; ++i) {
        double t_i = i * h;
        double integral = 0.0;
        for (int j = 0; j <= i; ++j) {
            double w = (j == 0 || j == i) ? 0.5 : 1.0;
            integral += w * kernel.value(t_i - j * h) * rhs_vals[static_cast<std::size_t>(j)];
        }
        double residual = std::abs(sol.psi[static_cast<std::size_t>(i)] -
                                   (problem.u * kernel.value(t_i) + h * integral));
        sol.max_residual = std::max(sol.max_residual, residual);
    }
    sol.converged = true;
    return sol;
}

double laplace_exponent(const RiccatiProblem& problem, const RiccatiSolution& solution, double x0) {
    if (!solution.converged) throw std::invalid_argument("laplace_exponent: unsolved psi");
    const double h = solution.step;
    const std::size_t n = solution.psi.size() - 1;
    double int_rhs = 0.0, int_psi = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        double w = (i == 0 || i == n) ? 0.5 : 1.0;
        double fv = problem.f ? problem.f(static_cast<double>(i) * h) : 0.0;
        int_rhs += w * riccati_rhs(solution.psi[i], fv, problem.coeffs);
        int_psi += w * solution.psi[i];
    }
    return problem.u * x0 + x0 * h * int_rhs + problem.coeffs.a * h * int_psi;
}

double laplace_functional(const std::vector<double>& xhat, double horizon, double u,
                          const std::function<double(double)>& f) {
    const std::size_t n = xhat.size() - 1;
    double exponent = u * xhat.back();
    if (f) {
        double h = horizon / static_cast<double>(n);
        for (std::size_t j = 0; j < n; ++j) {
            double s = static_cast<double>(j) * h;
            exponent += f(horizon - s) * xhat[j] * h;
        }
    }
    return std::exp(exponent);
}

McEstimate mc_mean_se(const std::vector<double>& values) {
    McEstimate out;
    if (values.empty()) return out;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    if (values.size() > 1) var /= static_cast<double>(values.size() - 1);
    out.estimate = mean;
    out.standard_error = std::sqrt(var / static_cast<double>(values.size()));
    return out;
}

McEstimate mc_laplace(const std::vector<std::vector<double>>& xhat_paths, double horizon, double u,
                      const std::function<double(double)>& f) {
    if (u > 0.0) throw std::invalid_argument("mc_laplace: u <= 0 required");
    std::vector<double> vals;
    vals.reserve(xhat_paths.size());
    for (const auto& path : xhat_paths) vals.push_back(laplace_functional(path, horizon, u, f));
    return mc_mean_se(vals);
}

}  // namespace svj
