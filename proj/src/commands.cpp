#include "svjlab/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "svjlab/analysis.hpp"
#include "svjlab/kernels.hpp"
#include "svjlab/levy.hpp"
#include "svjlab/model.hpp"
#include "svjlab/riccati.hpp"
#include "svjlab/scheme.hpp"
#include "svjlab/util.hpp"

namespace svj {

namespace {

using nlohmann::json;

std::unique_ptr<Kernel> kernel_from_json(const json& spec) {
    std::string type = spec.at("type").get<std::string>();
    if (type == "expsum") {
        return std::make_unique<ExpSumKernel>(spec.at("w").get<std::vector<double>>(),
                                              spec.at("lambda").get<std::vector<double>>());
    }
    if (type == "sampled") {
        return std::make_unique<SampledKernel>(spec.at("times").get<std::vector<double>>(),
                                               spec.at("values").get<std::vector<double>>());
    }
    throw std::invalid_argument("unknown kernel type: " + type);
}

ModelCoefficients model_from_json(const json& spec) {
    std::string name = spec.at("model").get<std::string>();
    if (name != "alpha_cir") throw std::invalid_argument("unknown model: " + name);
    return affine_coefficients(spec.at("a").get<double>(), spec.at("kappa").get<double>(),
                               spec.at("sigma").get<double>(), spec.at("eta").get<double>(),
                               spec.at("alpha").get<double>());
}

SchemeGrid grid_from_json(const json& spec) {
    SchemeGrid grid;
    grid.horizon = spec.at("T").get<double>();
    grid.intervals = spec.value("N", 64);
    grid.substeps = spec.value("n_sub", 16);
    if (!(grid.horizon > 0.0) || grid.intervals < 1 || grid.substeps < 1)
        throw std::invalid_argument("grid: T > 0, N >= 1, n_sub >= 1 required");
    return grid;
}

StableDriverParams driver_from_json(const json& config, double alpha, const SchemeGrid& grid) {
    StableDriverParams params;
    params.alpha = alpha;
    std::string mode = "exact";
    if (config.contains("driver")) mode = config["driver"].value("mode", "exact");
    if (mode == "exact")
        params.mode = DriverMode::ExactIncrement;
    else if (mode == "thinned")
        params.mode = DriverMode::Thinned;
    else
        throw std::invalid_argument("driver mode must be 'exact' or 'thinned'");
    double default_eps = std::pow(grid.horizon / grid.fine_steps(), 1.0 / alpha);
    params.jump_threshold =
        config.contains("driver") ? config["driver"].value("eps_j", default_eps) : default_eps;
    return params;
}

std::uint64_t seed_from(const json& config, const RunOptions& options) {
    if (options.seed_override >= 0) return static_cast<std::uint64_t>(options.seed_override);
    return config.value("seed", std::uint64_t{0});
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

json run_header(const json& config, std::uint64_t seed) {
    return json{{"version", kVersion}, {"seed", seed}, {"config", config}};
}

RunStatus cmd_kernel_check(const json& config, const RunOptions& options, std::uint64_t seed) {
    auto kernel = kernel_from_json(config.at("kernel"));
    double horizon = config.value("T", 2.0);
    int max_order = config.value("max_order", 4);
    int grid_size = config.value("grid_size", 512);
    int m_points = config.value("M", 5);
    int trials = config.value("trials", 2000);

    CmReport cm = check_complete_monotonicity(*kernel, horizon, max_order, grid_size);
    auto cert = search_nonneg_counterexample(*kernel, m_points, horizon, trials, seed);

    json report = run_header(config, seed);
    report["complete_monotonicity"] = {{"pass", cm.pass}};
    for (const auto& v : cm.violations)
        report["complete_monotonicity"]["violations"].push_back(
            {{"order", v.order}, {"time", v.time}, {"value", v.value}});
    report["nonneg_preservation"] = {{"counterexample_found", cert.has_value()}};
    if (cert) {
        report["nonneg_preservation"]["certificate"] = {{"times", cert->times},
                                                        {"coeffs", cert->coeffs},
                                                        {"violation_time", cert->violation_time},
                                                        {"violation_value", cert->violation_value}};
    }
    bool pass = cm.pass && !cert.has_value();
    report["pass"] = pass;
    write_text(std::filesystem::path(options.out_dir) / "kernel_report.json", report.dump(2) + "\n");
    return pass ? RunStatus::Ok : RunStatus::CheckFailed;
}

RunStatus cmd_simulate(const json& config, const RunOptions& options, std::uint64_t seed) {
    auto kernel = kernel_from_json(config.at("kernel"));
    if (!dynamic_cast<const ExpSumKernel*>(kernel.get()))
        throw std::invalid_argument("simulate: the scheme requires an expsum kernel");
    ModelCoefficients coeffs = model_from_json(config.at("model"));
    SchemeGrid grid = grid_from_json(config.at("grid"));
    StableDriverParams driver = driver_from_json(config, coeffs.alpha, grid);
    int n_paths = config.value("paths", 1000);
    double x0 = config.value("X0", 1.0);
    bool dump_fine = config.value("dump_fine", false);
    bool dump_noise = config.value("dump_noise", false);

    int stride = dump_fine ? 1 : grid.substeps;
    std::vector<double> dump_times;
    for (int j = 0; j <= grid.fine_steps(); j += stride) dump_times.push_back(grid.fine_time(j));

    struct PathDump {
        std::vector<double> xi, xhat, xbar;
        double min_xhat = 0.0, min_prefloor = 0.0;
        bool flagged = false;
    };
    std::vector<PathDump> dumps(static_cast<std::size_t>(n_paths));

    SchemeRunConfig run_cfg;
    run_cfg.grid = grid;
    run_cfg.driver = driver;
    run_cfg.x0 = x0;
    run_cfg.n_paths = n_paths;
    run_cfg.master_seed = seed;
    run_cfg.threads = options.threads;
    run_split_scheme(*kernel, coeffs, run_cfg, [&](int p, const SchemePath& path) {
        PathDump& d = dumps[static_cast<std::size_t>(p)];
        d.flagged = path.flagged;
        d.min_xhat = path.min_xhat;
        d.min_prefloor = path.min_prefloor;
        if (path.flagged) return;
        auto xbar = compute_barX(*kernel, x0, path.ledger, grid.horizon, dump_times);
        for (int j = 0; j <= grid.fine_steps(); j += stride) {
            d.xi.push_back(path.xi[static_cast<std::size_t>(j)]);
            d.xhat.push_back(path.xhat[static_cast<std::size_t>(j)]);
        }
        d.xbar = std::move(xbar);
    });

    std::string csv = "path,time,xi,xhat,xbar\n";
    int flagged = 0;
    double min_xhat = x0;
    for (int p = 0; p < n_paths; ++p) {
        const PathDump& d = dumps[static_cast<std::size_t>(p)];
        if (d.flagged) {
            ++flagged;
            continue;
        }
        min_xhat = std::min(min_xhat, d.min_xhat);
        for (std::size_t j = 0; j < dump_times.size(); ++j) {
            csv += std::to_string(p);
            csv += ',';
            csv += fmt(dump_times[j]);
            csv += ',';
            csv += fmt(d.xi[j]);
            csv += ',';
            csv += fmt(d.xhat[j]);
            csv += ',';
            csv += fmt(d.xbar[j]);
            csv += '\n';
        }
    }
    write_text(std::filesystem::path(options.out_dir) / "paths.csv", csv);

    if (dump_noise) {
        FineGrid noise_grid{grid.horizon, grid.fine_steps()};
        std::string noise_csv = "path,substep,dB,dL_or_jump_list\n";
        for (int p = 0; p < n_paths; ++p) {
            DriverNoise noise =
                derive_path_noise(seed, static_cast<std::uint64_t>(p), noise_grid, driver);
            for (std::size_t j = 0; j < noise.brownian.size(); ++j) {
                noise_csv += std::to_string(p);
                noise_csv += ',';
                noise_csv += std::to_string(j);
                noise_csv += ',';
                noise_csv += fmt(noise.brownian[j]);
                noise_csv += ',';
                if (noise.mode == DriverMode::ExactIncrement) {
                    noise_csv += fmt(noise.stable[j]);
                } else {
                    double left = noise_grid.dt() * static_cast<double>(j);
                    double right = left + noise_grid.dt();
                    std::string jumps;
                    for (std::size_t e = 0; e < noise.jumps.times.size(); ++e)
                        if (noise.jumps.times[e] > left && noise.jumps.times[e] <= right) {
                            if (!jumps.empty()) jumps += ';';
                            jumps += fmt(noise.jumps.times[e]) + ":" + fmt(noise.jumps.sizes[e]);
                        }
                    noise_csv += jumps;
                }
                noise_csv += '\n';
            }
        }
        write_text(std::filesystem::path(options.out_dir) / "noise.csv", noise_csv);
    }

    double flag_rate = static_cast<double>(flagged) / n_paths;
    json summary = run_header(config, seed);
    summary["paths"] = n_paths;
    summary["flagged_paths"] = flagged;
    summary["flag_rate"] = flag_rate;
    summary["positivity_min"] = min_xhat;
    summary["driver_eps_j"] = driver.jump_threshold;
    write_text(std::filesystem::path(options.out_dir) / "summary.json", summary.dump(2) + "\n");
    return RunStatus::Ok;
}

RunStatus cmd_converge(const json& config, const RunOptions& options, std::uint64_t seed) {
    auto kernel = kernel_from_json(config.at("kernel"));
    ModelCoefficients coeffs = model_from_json(config.at("model"));
    const json& grid_spec = config.at("grid");

    ConvergenceConfig cc;
    cc.n_list = grid_spec.at("N_list").get<std::vector<int>>();
    cc.substeps = grid_spec.value("n_sub", 16);
    cc.horizon = grid_spec.at("T").get<double>();
    cc.x0 = config.value("X0", 1.0);
    cc.n_paths = config.value("paths", 1000);
    cc.master_seed = seed;
    cc.threads = options.threads;
    SchemeGrid coarsest{cc.horizon, cc.n_list.front(), cc.substeps};
    cc.driver = driver_from_json(config, coeffs.alpha, coarsest);

    ConvergenceTable table = convergence_study(*kernel, coeffs, cc);
    double flag_rate = static_cast<double>(table.flagged_paths) / table.n_paths;

    std::string csv = "N,d_xi_xhat,d_xhat_xbar,d_xbar_cauchy,d_xbar_cauchy_se,sup_moment\n";
    json rows = json::array();
    for (const auto& row : table.rows) {
        csv += std::to_string(row.intervals) + ',' + fmt(row.d_xi_xhat) + ',' +
               fmt(row.d_xhat_xbar) + ',' + fmt(row.d_xbar_cauchy) + ',' +
               fmt(row.d_xbar_cauchy_se) + ',' + fmt(row.sup_moment) + '\n';
        rows.push_back({{"N", row.intervals},
                        {"d_xi_xhat", row.d_xi_xhat},
                        {"d_xhat_xbar", row.d_xhat_xbar},
                        {"d_xbar_cauchy", row.d_xbar_cauchy},
                        {"d_xbar_cauchy_se", row.d_xbar_cauchy_se},
                        {"sup_moment", row.sup_moment}});
    }
    write_text(std::filesystem::path(options.out_dir) / "convergence.csv", csv);

    json summary = run_header(config, seed);
    summary["rows"] = rows;
    summary["flagged_paths"] = table.flagged_paths;
    summary["cauchy_nonincreasing"] = table.cauchy_nonincreasing;
    write_text(std::filesystem::path(options.out_dir) / "convergence.json", summary.dump(2) + "\n");

    bool pass = table.cauchy_nonincreasing && flag_rate < 1e-3;
    return pass ? RunStatus::Ok : RunStatus::CheckFailed;
}

RunStatus cmd_laplace(const json& config, const RunOptions& options, std::uint64_t seed) {
    auto kernel = kernel_from_json(config.at("kernel"));
    if (!dynamic_cast<const ExpSumKernel*>(kernel.get()))
        throw std::invalid_argument("laplace: the scheme requires an expsum kernel");
    ModelCoefficients coeffs = model_from_json(config.at("model"));
    if (!coeffs.affine) throw std::invalid_argument("laplace: affine model required");
    SchemeGrid grid = grid_from_json(config.at("grid"));
    StableDriverParams driver = driver_from_json(config, coeffs.alpha, grid);

    const json& lap = config.at("laplace");
    double u = lap.at("u").get<double>();
    double f_const = lap.value("f", 0.0);
    if (u > 0.0 || f_const > 0.0) throw std::invalid_argument("laplace: u <= 0 and f <= 0 required");
    double h_psi = lap.value("h_psi", 1e-3);
    int n_paths = config.value("paths", 10000);
    double x0 = config.value("X0", 1.0);

    RiccatiProblem problem;
    problem.u = u;
    problem.f = [f_const](double) { return f_const; };
    problem.coeffs = *coeffs.affine;
    problem.kernel = kernel.get();
    problem.horizon = grid.horizon;
    problem.step = h_psi;
    RiccatiSolution solution = solve_psi(problem);
    if (!solution.converged) {
        json out = run_header(config, seed);
        out["psi_blowup_time"] = solution.blowup_time;
        write_text(std::filesystem::path(options.out_dir) / "laplace.json", out.dump(2) + "\n");
        return RunStatus::CheckFailed;
    }
    double y0 = laplace_exponent(problem, solution, x0);

    std::vector<double> functionals(static_cast<std::size_t>(n_paths), 0.0);
    std::vector<char> flagged(static_cast<std::size_t>(n_paths), 0);
    SchemeRunConfig run_cfg;
    run_cfg.grid = grid;
    run_cfg.driver = driver;
    run_cfg.x0 = x0;
    run_cfg.n_paths = n_paths;
    run_cfg.master_seed = seed;
    run_cfg.threads = options.threads;
    auto f_fn = [f_const](double) { return f_const; };
    run_split_scheme(*kernel, coeffs, run_cfg, [&](int p, const SchemePath& path) {
        if (path.flagged) {
            flagged[static_cast<std::size_t>(p)] = 1;
            return;
        }
        functionals[static_cast<std::size_t>(p)] =
            laplace_functional(path.xhat, grid.horizon, u, f_fn);
    });
    std::vector<double> used;
    used.reserve(functionals.size());
    int n_flagged = 0;
    for (std::size_t p = 0; p < functionals.size(); ++p) {
        if (flagged[p])
            ++n_flagged;
        else
            used.push_back(functionals[p]);
    }
    McEstimate mc = mc_mean_se(used);
    double transform = std::exp(y0);
    double z = mc.standard_error > 0.0 ? (mc.estimate - transform) / mc.standard_error : 0.0;

    json out = run_header(config, seed);
    out["psi_grid"] = solution.psi;
    out["psi_step"] = solution.step;
    out["psi_residual"] = solution.max_residual;
    out["Y0"] = y0;
    out["transform"] = transform;
    out["mc_estimate"] = mc.estimate;
    out["mc_se"] = mc.standard_error;
    out["z_score"] = z;
    out["flagged_paths"] = n_flagged;
    write_text(std::filesystem::path(options.out_dir) / "laplace.json", out.dump(2) + "\n");
    return std::abs(z) <= 3.0 ? RunStatus::Ok : RunStatus::CheckFailed;
}

RunStatus cmd_stable_test(const json& config, const RunOptions& options, std::uint64_t seed) {
    const json& spec = config.at("stable");
    double alpha = spec.at("alpha").get<double>();
    double u = spec.value("u", -1.0);
    double t = spec.value("t", 1.0);
    long long draws = spec.value("draws", 1000000LL);
    if (u > 0.0) throw std::invalid_argument("stable-test: u <= 0 required");

    StableDriverParams params;
    params.alpha = alpha;
    params.mode = DriverMode::ExactIncrement;

    // Block the draws across workers with per-block substreams so the result
    // does not depend on the thread count.
    const long long block = 65536;
    int n_blocks = static_cast<int>((draws + block - 1) / block);
    std::vector<double> block_sum(static_cast<std::size_t>(n_blocks), 0.0);
    std::vector<double> block_sumsq(static_cast<std::size_t>(n_blocks), 0.0);
    parallel_for(n_blocks, options.threads, [&](int b) {
        Rng rng(derive_stream_seed(seed, static_cast<std::uint64_t>(b)));
        long long lo = static_cast<long long>(b) * block;
        long long hi = std::min(draws, lo + block);
        double s = 0.0, s2 = 0.0;
        for (long long i = lo; i < hi; ++i) {
            double v = std::exp(u * sample_stable_increment(params, t, rng));
            s += v;
            s2 += v * v;
        }
        block_sum[static_cast<std::size_t>(b)] = s;
        block_sumsq[static_cast<std::size_t>(b)] = s2;
    });
    double sum = 0.0, sumsq = 0.0;
    for (int b = 0; b < n_blocks; ++b) {
        sum += block_sum[static_cast<std::size_t>(b)];
        sumsq += block_sumsq[static_cast<std::size_t>(b)];
    }
    double n = static_cast<double>(draws);
    double mean = sum / n;
    double var = std::max(0.0, (sumsq - n * mean * mean) / (n - 1.0));
    double se = std::sqrt(var / n);
    double expected = std::exp(t * std::pow(std::abs(u), alpha) /
                               std::cos(0.5 * M_PI * (2.0 - alpha)));
    double z = se > 0.0 ? (mean - expected) / se : 0.0;

    json out = run_header(config, seed);
    out["alpha"] = alpha;
    out["u"] = u;
    out["t"] = t;
    out["draws"] = draws;
    out["empirical_mean"] = mean;
    out["expected"] = expected;
    out["standard_error"] = se;
    out["z_score"] = z;
    out["compensator_mass"] = compensator_mass(alpha);
    write_text(std::filesystem::path(options.out_dir) / "stable_test.json", out.dump(2) + "\n");
    return std::abs(z) <= 3.0 ? RunStatus::Ok : RunStatus::CheckFailed;
}

}  // namespace

RunStatus run_command(const std::string& command, const std::string& config_json,
                      const RunOptions& options, std::string* error_message) {
    try {
        json config = json::parse(config_json);
        std::filesystem::create_directories(options.out_dir);
        std::uint64_t seed = seed_from(config, options);
        if (command == "kernel-check") return cmd_kernel_check(config, options, seed);
        if (command == "simulate") return cmd_simulate(config, options, seed);
        if (command == "converge") return cmd_converge(config, options, seed);
        if (command == "laplace") return cmd_laplace(config, options, seed);
        if (command == "stable-test") return cmd_stable_test(config, options, seed);
        if (error_message) *error_message = "unknown command: " + command;
        return RunStatus::ConfigError;
    } catch (const nlohmann::json::exception& e) {
        if (error_message) *error_message = e.what();
        return RunStatus::ConfigError;
    } catch (const std::invalid_argument& e) {
        if (error_message) *error_message = e.what();
        return RunStatus::ConfigError;
    } catch (const std::exception& e) {
        if (error_message) *error_message = e.what();
        return RunStatus::RuntimeError;
    }
}

}  // namespace svj
