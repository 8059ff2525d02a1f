#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "svjlab/kernels.hpp"
#include "svjlab/riccati.hpp"

using namespace svj;

namespace {

// Classical CIR Riccati ODE psi' = f - kappa psi + (sigma^2/2) psi^2,
// integrated by RK4 at a much finer step than the Volterra solver under test.
std::vector<double> rk4_cir_psi(double u, double f, double kappa, double sigma, double horizon,
                                double h_out, double h_fine) {
    auto rhs = [&](double p) { return f - kappa * p + 0.5 * sigma * sigma * p * p; };
    int n_out = static_cast<int>(std::round(horizon / h_out));
    int per = static_cast<int>(std::round(h_out / h_fine));
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n_out) + 1);
    double p = u;
    out.push_back(p);
    for (int i = 0; i < n_out; ++i) {
        for (int j = 0; j < per; ++j) {
            double k1 = rhs(p);
            double k2 = rhs(p + 0.5 * h_fine * k1);
            double k3 = rhs(p + 0.5 * h_fine * k2);
            double k4 = rhs(p + h_fine * k3);
            p += h_fine / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        out.push_back(p);
    }
    return out;
}

// Closed-form CIR Laplace transform E[e^{u X_T}] for dX = (a - kappa X)dt
// + sigma sqrt(X) dW: exp(phi(T) + psi(T) X0) with
//   psi(t) = u e^{-kt} / D(t), D(t) = 1 - (sigma^2 u / (2k))(1 - e^{-kt}),
//   phi(t) = -(2a / sigma^2) log D(t).
double cir_transform(double u, double a, double kappa, double sigma, double x0, double horizon) {
    double e = std::exp(-kappa * horizon);
    double d = 1.0 - sigma * sigma * u / (2.0 * kappa) * (1.0 - e);
    double psi = u * e / d;
    double phi = -(2.0 * a / (sigma * sigma)) * std::log(d);
    return std::exp(phi + psi * x0);
}

}  // namespace

TEST_CASE("riccati right-hand side") {
    AffineParams p{1.0, 1.0, 0.5, 0.3, 1.5};
    CHECK(riccati_rhs(0.0, 0.0, p) == 0.0);
    AffineParams q{0.0, 0.0, 0.0, 1.0, 1.5};
    // jump term alone at psi = -1: 1/cos(pi/4) = sqrt 2
    CHECK(riccati_rhs(-1.0, 0.0, q) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(std::sqrt(2.0) == doctest::Approx(1.41421).epsilon(1e-5));
    AffineParams r{0.0, 2.0, 1.0, 0.0, 1.5};
    CHECK(riccati_rhs(-1.0, -0.5, r) == doctest::Approx(-0.5 + 2.0 + 0.5).epsilon(1e-14));
}

TEST_CASE("u=0, f=0 gives the trivial solution") {
    ExpSumKernel kernel({0.7, 0.3}, {0.5, 3.0});
    RiccatiProblem problem;
    problem.u = 0.0;
    problem.f = [](double) { return 0.0; };
    problem.coeffs = AffineParams{1.0, 1.0, 0.5, 0.3, 1.5};
    problem.kernel = &kernel;
    problem.horizon = 1.0;
    RiccatiSolution sol = solve_psi(problem);
    REQUIRE(sol.converged);
    for (double v : sol.psi) CHECK(v == 0.0);
    CHECK(laplace_exponent(problem, sol, 1.0) == 0.0);
}

TEST_CASE("positive u is rejected") {
    ExpSumKernel kernel({1.0}, {1.0});
    RiccatiProblem problem;
    problem.u = 0.5;
    problem.f = [](double) { return 0.0; };
    problem.coeffs = AffineParams{1.0, 1.0, 0.5, 0.0, 1.5};
    problem.kernel = &kernel;
    CHECK_THROWS_AS(solve_psi(problem), std::invalid_argument);
}

TEST_CASE("constant kernel reduces to the classical CIR Riccati ODE") {
    const double a = 1.0, kappa = 1.0, sigma = 0.5, u = -0.5, x0 = 1.0, horizon = 1.0;
    ExpSumKernel constant({1.0}, {0.0});
    RiccatiProblem problem;
    problem.u = u;
    problem.f = [](double) { return 0.0; };
    problem.coeffs = AffineParams{a, kappa, sigma, 0.0, 1.5};
    problem.kernel = &constant;
    problem.horizon = horizon;
    problem.step = 1e-3;
    RiccatiSolution sol = solve_psi(problem);
    REQUIRE(sol.converged);

    auto oracle = rk4_cir_psi(u, 0.0, kappa, sigma, horizon, 1e-3, 1e-5);
    REQUIRE(oracle.size() == sol.psi.size());
    double sup = 0.0;
    for (std::size_t i = 0; i < oracle.size(); ++i)
        sup = std::max(sup, std::abs(oracle[i] - sol.psi[i]));
    CHECK(sup <= 1e-6);

    double transform = std::exp(laplace_exponent(problem, sol, x0));
    double exact = cir_transform(u, a, kappa, sigma, x0, horizon);
    CHECK(std::abs(transform - exact) / exact <= 1e-4);
}

TEST_CASE("riccati with a non-constant kernel and jumps converges with small residual") {
    ExpSumKernel kernel({0.7, 0.3}, {0.5, 3.0});
    RiccatiProblem problem;
    problem.u = -1.0;
    problem.f = [](double) { return -0.5; };
    problem.coeffs = AffineParams{1.0, 1.0, 0.5, 0.3, 1.5};
    problem.kernel = &kernel;
    problem.horizon = 1.0;
    problem.step = 1e-3;
    RiccatiSolution sol = solve_psi(problem);
    REQUIRE(sol.converged);
    CHECK(sol.psi.front() == doctest::Approx(-1.0 * kernel.value(0.0)).epsilon(1e-12));
    for (double v : sol.psi) CHECK(v <= 0.0);  // u,f <= 0 keep psi nonpositive
    CHECK(sol.max_residual < 1e-3);
    // halving the step should not move the solution much (self-consistency)
    problem.step = 5e-4;
    RiccatiSolution fine = solve_psi(problem);
    REQUIRE(fine.converged);
    CHECK(std::abs(fine.psi.back() - sol.psi.back()) < 1e-5);
}

TEST_CASE("monte carlo reductions") {
    SUBCASE("deterministic unit paths, u=-1, f=0 give exp(-1) with zero SE") {
        std::vector<std::vector<double>> paths(5, std::vector<double>(11, 1.0));
        McEstimate est = mc_laplace(paths, 1.0, -1.0, [](double) { return 0.0; });
        CHECK(est.estimate == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
        CHECK(est.standard_error == 0.0);
    }
    SUBCASE("u=0, f=0 is exactly one") {
        std::vector<std::vector<double>> paths(3, std::vector<double>(5, 2.0));
        McEstimate est = mc_laplace(paths, 1.0, 0.0, [](double) { return 0.0; });
        CHECK(est.estimate == 1.0);
        CHECK(est.standard_error == 0.0);
    }
    SUBCASE("running integral uses f(T - s)") {
        // single path x(s) = 1, f = -1: exponent u x_T + sum f * 1 * h = -1 - 1
        std::vector<double> path(11, 1.0);
        double v = laplace_functional(path, 1.0, -1.0, [](double) { return -1.0; });
        CHECK(v == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
    }
    SUBCASE("mean and standard error") {
        McEstimate est = mc_mean_se({1.0, 2.0, 3.0, 4.0});
        CHECK(est.estimate == doctest::Approx(2.5));
        // sample sd = sqrt(5/3), se = sd / 2
        CHECK(est.standard_error == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0).epsilon(1e-12));
    }
}
