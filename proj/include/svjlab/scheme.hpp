#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "svjlab/inner_sde.hpp"
#include "svjlab/kernels.hpp"
#include "svjlab/levy.hpp"
#include "svjlab/model.hpp"

namespace svj {

// Regular coarse grid t_k = k T / N with n_sub substeps per interval.
struct SchemeGrid {
    double horizon = 1.0;
    int intervals = 1;   // N
    int substeps = 1;    // n_sub

    int fine_steps() const { return intervals * substeps; }
    double coarse_dt() const { return horizon / intervals; }
    double fine_dt() const { return horizon / fine_steps(); }
    double fine_time(int j) const { return horizon * j / fine_steps(); }
    // Interval locator: k such that t in [t_k, t_{k+1}).
    int locate(double t) const {
        int k = static_cast<int>(t * intervals / horizon);
        return k < intervals ? k : intervals - 1;
    }
};

// One simulated path of the splitting scheme. Fine-grid arrays have
// fine_steps()+1 entries (index 0 is t = 0).
struct SchemePath {
    std::vector<double> xi;            // inner chain at fine times
    std::vector<double> xhat;          // recombined process at fine times
    std::vector<double> coarse_delta;  // (Xhat_{t_k} - Xhat_{t_k-}) / K(0), k = 1..N
    std::vector<LedgerEntry> ledger;   // Z increments
    double min_xhat = 0.0;
    double min_prefloor = 0.0;
    bool flagged = false;  // inner-solver overflow; exclude from statistics
};

// Runs the splitting alternation for one path with externally supplied noise.
// `noise` must be on the scheme's fine grid (aggregate beforehand if coupling).
SchemePath run_split_path(const Kernel& kernel, const ModelCoefficients& coeffs, double x0,
                          const SchemeGrid& grid, const DriverNoise& noise,
                          double overflow_guard = 1e12);

// Discrete convolution Xbar_t = X0 + sum_{s_j < t} K(t - s_j) dZ_j at the
// requested times (ascending). `ledger_horizon` is the time span the ledger
// covers; eval times beyond it are rejected. Uses an O(n) recursion for
// ExpSumKernel.
std::vector<double> compute_barX(const Kernel& kernel, double x0,
                                 std::span<const LedgerEntry> ledger, double ledger_horizon,
                                 std::span<const double> eval_times);

// Reference O(n^2) evaluation, kept as an independent cross-check of the
// recursive path.
std::vector<double> compute_barX_direct(const Kernel& kernel, double x0,
                                        std::span<const LedgerEntry> ledger,
                                        std::span<const double> eval_times);

// Recomputes Xhat_{t_{k+1}-} from the coarse jump ledger via the
// recombination formula; used by the recombination-identity check.
double recombine_at(const Kernel& kernel, double x0, std::span<const double> coarse_delta,
                    double coarse_dt, int upto_k, double t);

// Markovian multi-factor oracle for sum-of-exponential kernels:
// X_t = X0 + sum_i w_i X^i_t, dX^i = -lambda_i X^i dt + dZ with coefficients
// evaluated at X+. Same substep grid and noise as the split scheme.
struct OracleResult {
    std::vector<double> x;  // at fine times
    bool flagged = false;
};

OracleResult run_markovian_oracle(const ExpSumKernel& kernel, const ModelCoefficients& coeffs,
                                  double x0, const SchemeGrid& grid, const DriverNoise& noise,
                                  double overflow_guard = 1e12);

// Path-parallel driver: calls consumer(path_index, path) for each path.
// Each path owns its noise and solver; consumers write to per-path slots.
struct SchemeRunConfig {
    SchemeGrid grid;
    StableDriverParams driver;
    double x0 = 1.0;
    int n_paths = 1;
    std::uint64_t master_seed = 0;
    int threads = 0;  // 0 = hardware concurrency
    double overflow_guard = 1e12;
    // Noise is derived on finest_steps and aggregated down to the scheme grid
    // when finest_steps > fine_steps (coupled multi-N studies).
    int finest_steps = 0;  // 0 = grid.fine_steps()
};

void run_split_scheme(const Kernel& kernel, const ModelCoefficients& coeffs,
                      const SchemeRunConfig& config,
                      const std::function<void(int, const SchemePath&)>& consumer);

}  // namespace svj
