#include "svjlab/scheme.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace svj {

namespace {

// Per-factor state for evaluating Eq-(4.1)-style recombinations of an
// exponential-sum kernel in O(1) per time point.
struct ExpFactors {
    const ExpSumKernel* kernel = nullptr;
    std::vector<double> acc;  // sum_j d_j exp(-lambda_i (t_ref - t_j))
    double t_ref = 0.0;

    explicit ExpFactors(const ExpSumKernel* k) : kernel(k) {
        if (k) acc.assign(k->size(), 0.0);
    }
    void advance(double t) {
        for (std::size_t i = 0; i < acc.size(); ++i)
            acc[i] *= std::exp(-kernel->rates()[i] * (t - t_ref));
        t_ref = t;
    }
    void add(double d) {
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += d;
    }
    double eval(double t) const {
        double s = 0.0;
        for (std::size_t i = 0; i < acc.size(); ++i)
            s += kernel->weights()[i] * acc[i] * std::exp(-kernel->rates()[i] * (t - t_ref));
        return s;
    }
};

}  // namespace

SchemePath run_split_path(const Kernel& kernel, const ModelCoefficients& coeffs, double x0,
                          const SchemeGrid& grid, const DriverNoise& noise,
                          double overflow_guard) {
    if (x0 < 0.0) throw std::invalid_argument("run_split_path: X0 >= 0 required");
    const int n_fine = grid.fine_steps();
    if (noise.brownian.size() != static_cast<std::size_t>(n_fine))
        throw std::invalid_argument("run_split_path: noise not on the scheme's fine grid");
    const double k0 = kernel.value(0.0);
    const double coarse_dt = grid.coarse_dt();

    SchemePath path;
    path.xi.assign(static_cast<std::size_t>(n_fine) + 1, 0.0);
    path.xhat.assign(static_cast<std::size_t>(n_fine) + 1, 0.0);
    path.coarse_delta.reserve(static_cast<std::size_t>(grid.intervals));
    path.xhat[0] = x0;
    path.xi[0] = x0;
    path.min_xhat = x0;
    path.min_prefloor = x0;

    const auto* expsum = dynamic_cast<const ExpSumKernel*>(&kernel);
    ExpFactors factors(expsum);

    // Generic recombination: Xhat_t = X0 + sum_{j<=k} d_j K(t - t_j).
    auto xhat_generic = [&](double t, int upto_k) {
        double s = x0;
        for (int j = 1; j <= upto_k; ++j)
            s += path.coarse_delta[static_cast<std::size_t>(j - 1)] * kernel.value(t - j * coarse_dt);
        return s;
    };
    auto xhat_at = [&](double t) {
        return expsum ? x0 + factors.eval(t)
                      : xhat_generic(t, static_cast<int>(path.coarse_delta.size()));
    };

    InnerSolveConfig inner_cfg{grid.substeps, overflow_guard};

    // Pre-slice thinned jumps by coarse interval.
    std::vector<std::size_t> jump_begin(static_cast<std::size_t>(grid.intervals) + 1, 0);
    if (noise.mode == DriverMode::Thinned) {
        std::size_t cursor = 0;
        for (int k = 0; k < grid.intervals; ++k) {
            jump_begin[static_cast<std::size_t>(k)] = cursor;
            double right = (k + 1) * coarse_dt;
            while (cursor < noise.jumps.times.size() && noise.jumps.times[cursor] <= right) ++cursor;
        }
        jump_begin[static_cast<std::size_t>(grid.intervals)] = cursor;
    }

    for (int k = 0; k < grid.intervals; ++k) {
        double t_k = k * coarse_dt;
        double t_k1 = (k + 1) * coarse_dt;

        // Fine-grid values of Xhat strictly inside (t_k, t_{k+1}).
        for (int s = 1; s < grid.substeps; ++s) {
            int idx = k * grid.substeps + s;
            double v = xhat_at(grid.fine_time(idx));
            path.xhat[static_cast<std::size_t>(idx)] = v;
            if (v < path.min_xhat) path.min_xhat = v;
        }
        double xhat_left_limit = xhat_at(t_k1);  // Xhat_{t_{k+1}-}
        if (xhat_left_limit < path.min_xhat) path.min_xhat = xhat_left_limit;

        NoiseSlice slice;
        slice.mode = noise.mode;
        std::size_t off = static_cast<std::size_t>(k) * static_cast<std::size_t>(grid.substeps);
        slice.brownian = std::span<const double>(noise.brownian).subspan(off,
                                                 static_cast<std::size_t>(grid.substeps));
        if (noise.mode == DriverMode::ExactIncrement) {
            slice.stable = std::span<const double>(noise.stable).subspan(off,
                                                   static_cast<std::size_t>(grid.substeps));
        } else {
            std::size_t b = jump_begin[static_cast<std::size_t>(k)];
            std::size_t e = jump_begin[static_cast<std::size_t>(k) + 1];
            slice.jump_times = std::span<const double>(noise.jumps.times).subspan(b, e - b);
            slice.jump_sizes = std::span<const double>(noise.jumps.sizes).subspan(b, e - b);
            slice.compensator_drift = noise.jumps.compensator_drift;
        }

        double start = std::max(xhat_left_limit, 0.0);
        InnerResult inner = solve_inner(coeffs, k0, start, t_k, coarse_dt, inner_cfg, slice);
        if (inner.min_prefloor < path.min_prefloor) path.min_prefloor = inner.min_prefloor;
        for (auto& e : inner.ledger) path.ledger.push_back(e);
        if (inner.overflow) {
            path.flagged = true;
            return path;
        }
        for (int s = 0; s < grid.substeps; ++s)
            path.xi[static_cast<std::size_t>(k * grid.substeps + s + 1)] =
                inner.states[static_cast<std::size_t>(s)];

        // Gluing rule: Xhat_{t_{k+1}} := xi_{t_{k+1}-}, stored bitwise.
        path.xhat[static_cast<std::size_t>((k + 1) * grid.substeps)] = inner.terminal;
        double delta = (inner.terminal - xhat_left_limit) / k0;
        path.coarse_delta.push_back(delta);
        if (expsum) {
            factors.advance(t_k1);
            factors.add(delta);
        }
    }
    return path;
}

std::vector<double> compute_barX_direct(const Kernel& kernel, double x0,
                                        std::span<const LedgerEntry> ledger,
                                        std::span<const double> eval_times) {
    std::vector<double> out(eval_times.size(), x0);
    for (std::size_t i = 0; i < eval_times.size(); ++i) {
        double t = eval_times[i];
        for (const auto& e : ledger) {
            if (e.time >= t) break;
            out[i] += kernel.value(t - e.time) * e.dz;
        }
    }
    return out;
}

std::vector<double> compute_barX(const Kernel& kernel, double x0,
                                 std::span<const LedgerEntry> ledger, double ledger_horizon,
                                 std::span<const double> eval_times) {
    for (double t : eval_times)
        if (t > ledger_horizon * (1.0 + 1e-12))
            throw std::invalid_argument("compute_barX: eval time beyond ledger");
    const auto* expsum = dynamic_cast<const ExpSumKernel*>(&kernel);
    if (!expsum) return compute_barX_direct(kernel, x0, ledger, eval_times);

    std::vector<double> out(eval_times.size(), x0);
    ExpFactors factors(expsum);
    std::size_t cursor = 0;
    for (std::size_t i = 0; i < eval_times.size(); ++i) {
        double t = eval_times[i];
        while (cursor < ledger.size() && ledger[cursor].time < t) {
            factors.advance(ledger[cursor].time);
            factors.add(ledger[cursor].dz);
            ++cursor;
        }
        out[i] = x0 + factors.eval(t);
    }
    return out;
}

double recombine_at(const Kernel& kernel, double x0, std::span<const double> coarse_delta,
                    double coarse_dt, int upto_k, double t) {
    double s = x0;
    for (int j = 1; j <= upto_k; ++j)
        s += coarse_delta[static_cast<std::size_t>(j - 1)] * kernel.value(t - j * coarse_dt);
    return s;
}

OracleResult run_markovian_oracle(const ExpSumKernel& kernel, const ModelCoefficients& coeffs,
                                  double x0, const SchemeGrid& grid, const DriverNoise& noise,
                                  double overflow_guard) {
    const int n_fine = grid.fine_steps();
    if (noise.brownian.size() != static_cast<std::size_t>(n_fine))
        throw std::invalid_argument("run_markovian_oracle: noise not on the fine grid");
    const double h = grid.fine_dt();
    const std::size_t n_factors = kernel.size();

    OracleResult result;
    result.x.assign(static_cast<std::size_t>(n_fine) + 1, 0.0);
    result.x[0] = x0;
    std::vector<double> factor(n_factors, 0.0);
    double x = x0;
    std::size_t jump_cursor = 0;

    for (int j = 0; j < n_fine; ++j) {
        double xp = x > 0.0 ? x : 0.0;
        double dz;
        if (noise.mode == DriverMode::ExactIncrement) {
            dz = coeffs.mu(xp) * h + coeffs.sigma(xp) * noise.brownian[static_cast<std::size_t>(j)] +
                 coeffs.gamma(xp) * noise.stable[static_cast<std::size_t>(j)];
        } else {
            dz = (coeffs.mu(xp) - coeffs.gamma(xp) * noise.jumps.compensator_drift) * h +
                 coeffs.sigma(xp) * noise.brownian[static_cast<std::size_t>(j)];
        }
        double dx = 0.0;
        for (std::size_t i = 0; i < n_factors; ++i) {
            double di = dz - kernel.rates()[i] * factor[i] * h;
            factor[i] += di;
            dx += kernel.weights()[i] * di;
        }
        // Same arithmetic order and positivity policy as the inner solver so
        // the n=1, lambda=0 degeneration reproduces it bitwise.
        double xn = x + dx;
        if (xn < 0.0) xn = 0.0;
        x = xn;

        if (noise.mode == DriverMode::Thinned) {
            double sub_right = grid.fine_time(j + 1);
            double sub_left = grid.fine_time(j);
            while (jump_cursor < noise.jumps.times.size() &&
                   noise.jumps.times[jump_cursor] <= sub_right) {
                if (noise.jumps.times[jump_cursor] > sub_left) {
                    double g = coeffs.gamma(x > 0.0 ? x : 0.0) * noise.jumps.sizes[jump_cursor];
                    double dxj = 0.0;
                    for (std::size_t i = 0; i < n_factors; ++i) {
                        factor[i] += g;
                        dxj += kernel.weights()[i] * g;
                    }
                    double xj = x + dxj;
                    if (xj < 0.0) xj = 0.0;
                    x = xj;
                }
                ++jump_cursor;
            }
        }

        if (!std::isfinite(x) || std::abs(x) > overflow_guard) {
            result.flagged = true;
            return result;
        }
        result.x[static_cast<std::size_t>(j + 1)] = x;
    }
    return result;
}

void run_split_scheme(const Kernel& kernel, const ModelCoefficients& coeffs,
                      const SchemeRunConfig& config,
                      const std::function<void(int, const SchemePath&)>& consumer) {
    int finest = config.finest_steps > 0 ? config.finest_steps : config.grid.fine_steps();
    if (finest % config.grid.fine_steps() != 0)
        throw std::invalid_argument("run_split_scheme: finest_steps must be a multiple of the grid");
    int factor = finest / config.grid.fine_steps();

    int threads = config.threads > 0 ? config.threads
                                     : static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    threads = std::min(threads, config.n_paths);

    FineGrid noise_grid{config.grid.horizon, finest};
    std::atomic<int> next{0};
    auto worker = [&]() {
        while (true) {
            int p = next.fetch_add(1);
            if (p >= config.n_paths) break;
            DriverNoise noise = derive_path_noise(config.master_seed,
                                                  static_cast<std::uint64_t>(p), noise_grid,
                                                  config.driver);
            if (factor > 1) noise = aggregate_noise(noise, factor);
            SchemePath path = run_split_path(kernel, coeffs, config.x0, config.grid, noise,
                                             config.overflow_guard);
            consumer(p, path);
        }
    };

    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
}

}  // namespace svj
