#include "svjlab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "svjlab/rng.hpp"
#include "svjlab/util.hpp"

namespace svj {

namespace {
constexpr double kSlack = 1e-9;
constexpr int kPhiTablePoints = 50001;
constexpr double kRampFraction = 0.05;
}  // namespace

YwFunction::YwFunction(double delta, double eps) : delta_(delta), eps_(eps) {
    if (!(delta > 1.0)) throw std::invalid_argument("YwFunction: delta > 1 required");
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("YwFunction: eps in (0,1) required");
    log_delta_ = std::log(delta);
    ramp_ = kRampFraction * log_delta_;

    // Untapered integral of the envelope times the unit-height taper; the
    // plateau height normalizes the density to integrate to exactly 1.
    double raw = 2.0 * (log_delta_ - ramp_) / log_delta_;
    plateau_ = 1.0 / raw;
    if (plateau_ > 1.0) throw std::logic_error("YwFunction: taper plateau exceeded 1");

    // phi on the support by cumulative quadrature of the exact cumulative.
    table_y_.resize(kPhiTablePoints);
    table_phi_.resize(kPhiTablePoints);
    double l0 = std::log(eps_ / delta_);
    double l1 = std::log(eps_);
    for (int i = 0; i < kPhiTablePoints; ++i)
        table_y_[static_cast<std::size_t>(i)] =
            std::exp(l0 + (l1 - l0) * i / (kPhiTablePoints - 1));
    table_y_.front() = eps_ / delta_;
    table_y_.back() = eps_;
    table_phi_[0] = 0.0;
    for (int i = 1; i < kPhiTablePoints; ++i) {
        double a = table_y_[static_cast<std::size_t>(i - 1)];
        double b = table_y_[static_cast<std::size_t>(i)];
        table_phi_[static_cast<std::size_t>(i)] =
            table_phi_[static_cast<std::size_t>(i - 1)] +
            0.5 * (b - a) * (cumulative(a) + cumulative(b));
    }
}

double YwFunction::density(double x) const {
    if (x < eps_ / delta_ || x > eps_) return 0.0;
    double l = std::log(x);
    double l0 = std::log(eps_ / delta_);
    double l1 = std::log(eps_);
    double taper;
    if (l < l0 + ramp_)
        taper = (l - l0) / ramp_;
    else if (l > l1 - ramp_)
        taper = (l1 - l) / ramp_;
    else
        taper = 1.0;
    taper = std::clamp(taper, 0.0, 1.0);
    return plateau_ * taper * 2.0 / (x * log_delta_);
}

double YwFunction::cumulative(double y) const {
    double l0 = std::log(eps_ / delta_);
    double l1 = std::log(eps_);
    if (y <= eps_ / delta_) return 0.0;
    double l = y >= eps_ ? l1 : std::log(y);
    // Area under the unit taper in log coordinates, piecewise closed form.
    double area;
    if (l <= l0 + ramp_) {
        double d = l - l0;
        area = 0.5 * d * d / ramp_;
    } else if (l <= l1 - ramp_) {
        area = 0.5 * ramp_ + (l - l0 - ramp_);
    } else {
        double d = l1 - l;
        area = (log_delta_ - ramp_) - 0.5 * d * d / ramp_;
    }
    double v = plateau_ * 2.0 * area / log_delta_;
    return std::min(v, 1.0);
}

double YwFunction::phi(double x) const {
    double y = std::abs(x);
    if (y <= eps_ / delta_) return 0.0;
    double tail = 0.0;
    if (y >= eps_) {
        tail = y - eps_;
        y = eps_;
    }
    // Bracket in the log-uniform table, then a local trapezoid correction
    // with exact cumulative values at both ends.
    double l0 = std::log(eps_ / delta_);
    double l1 = std::log(eps_);
    double pos = (std::log(y) - l0) / (l1 - l0) * (kPhiTablePoints - 1);
    int k = std::clamp(static_cast<int>(pos), 0, kPhiTablePoints - 2);
    double yk = table_y_[static_cast<std::size_t>(k)];
    if (y < yk) {
        k = std::max(0, k - 1);
        yk = table_y_[static_cast<std::size_t>(k)];
    }
    return table_phi_[static_cast<std::size_t>(k)] +
           0.5 * (y - yk) * (cumulative(yk) + cumulative(y)) + tail;
}

double YwFunction::phi_deriv1(double x) const {
    if (x == 0.0) return 0.0;
    double c = cumulative(std::abs(x));
    return x > 0.0 ? c : -c;
}

double YwFunction::phi_deriv2(double x) const { return density(std::abs(x)); }

YwFunction build_yw(double delta, double eps) { return YwFunction(delta, eps); }

YwInequalityReport verify_yw_inequalities(const YwFunction& yw, int samples, std::uint64_t seed) {
    if (samples < 1) throw std::invalid_argument("verify_yw_inequalities: samples >= 1");
    YwInequalityReport report;
    Rng rng(seed);
    double eps = yw.eps();
    double bound_env = 2.0 / std::log(yw.delta());

    auto check = [&](double x) {
        ++report.samples;
        double margins[3] = {
            eps + yw.phi(x) - std::abs(x),
            1.0 - std::abs(yw.phi_deriv1(x)),
            (std::abs(x) > 0.0 ? bound_env / std::abs(x) : 0.0) - yw.phi_deriv2(x),
        };
        // The envelope bound only applies on the support; off it phi'' is 0.
        if (std::abs(x) < eps / yw.delta() || std::abs(x) > eps)
            margins[2] = -yw.phi_deriv2(x);
        for (double m : margins) {
            if (m < report.worst_slack) report.worst_slack = m;
            if (m < -kSlack) {
                ++report.violations;
                break;
            }
        }
    };

    check(0.0);
    check(eps / yw.delta());
    check(eps);
    check(-eps);
    check(2.0 * eps);
    for (int i = report.samples; i < samples; ++i) {
        double x = (i % 2 == 0) ? rng.uniform(-2.0 * eps, 2.0 * eps) : rng.uniform(-1.0, 1.0);
        check(x);
    }
    return report;
}

YwInequalityReport verify_yw_lemmas(const YwFunction& yw, const ModelCoefficients& coeffs, double c,
                                    int samples, std::uint64_t seed) {
    if (!(c > 0.0)) throw std::invalid_argument("verify_yw_lemmas: c > 0 required");
    YwInequalityReport report;
    Rng rng(seed);
    const double box = 5.0;
    const double u_max = 10.0;
    const double eps = yw.eps();
    const double delta = yw.delta();
    const double log_delta = std::log(delta);
    const double c_or_c2 = std::max(c, c * c);

    struct Tuple {
        double x, y, a, b, u;
    };
    std::vector<Tuple> tuples(static_cast<std::size_t>(samples));
    for (auto& t : tuples)
        t = {rng.uniform(-box, box), rng.uniform(-box, box), rng.uniform(-box, box),
             rng.uniform(-box, box), u_max * rng.uniform()};
    // Degenerate cases the inequalities must also cover: z = 0 and
    // coincident pairs (alpha, beta) = (x, y).
    if (samples >= 2) {
        tuples[0].y = tuples[0].x;
        tuples[1].a = tuples[1].x;
        tuples[1].b = tuples[1].y;
    }

    // Sampled 1/2-Hoelder constant of gamma over every pair the lemmas touch.
    auto ratio = [&](double p, double q) {
        double d = std::abs(p - q);
        if (d < 1e-14) return 0.0;
        return std::abs(coeffs.gamma(p) - coeffs.gamma(q)) / std::sqrt(d);
    };
    double holder = 0.0;
    for (const auto& t : tuples) {
        holder = std::max({holder, ratio(t.x, t.y), ratio(t.a, t.b), ratio(t.a, t.x),
                           ratio(t.b, t.y)});
    }
    holder *= 1.0 + 1e-10;

    for (const auto& t : tuples) {
        ++report.samples;
        double z = t.x - t.y;
        double h_xy = t.u * (coeffs.gamma(t.x) - coeffs.gamma(t.y));
        double h_ab = t.u * (coeffs.gamma(t.a) - coeffs.gamma(t.b));
        double f = holder * t.u;
        double f_min = std::min(f, f * f);

        double lhs1 = yw.phi(z + c * h_xy) - yw.phi(z) - c * h_xy * yw.phi_deriv1(z);
        double rhs1 = 2.0 * c_or_c2 * f_min * (std::sqrt(eps) + 1.0 / log_delta);
        double m_low = lhs1;                     // lemma lower bound: lhs1 >= 0
        double m_up = rhs1 - lhs1;

        double lhs2 = yw.phi(z + c * h_ab) - yw.phi(z + c * h_xy) -
                      c * (h_ab - h_xy) * yw.phi_deriv1(z);
        double rhs2 = 6.0 * c_or_c2 * f_min *
                      (std::sqrt(std::abs(t.x - t.a)) + std::sqrt(std::abs(t.y - t.b)) +
                       1.0 / log_delta +
                       delta / (eps * log_delta) * (std::abs(t.x - t.a) + std::abs(t.y - t.b)));
        double m2 = rhs2 - lhs2;

        for (double m : {m_low, m_up, m2}) {
            if (m < report.worst_slack) report.worst_slack = m;
            if (m < -kSlack) {
                ++report.violations;
                break;
            }
        }
    }
    return report;
}

L1Distance l1_distance(const std::vector<std::vector<double>>& paths_a,
                       const std::vector<std::vector<double>>& paths_b) {
    if (paths_a.size() != paths_b.size() || paths_a.empty())
        throw std::invalid_argument("l1_distance: matching non-empty path counts required");
    std::size_t n_times = paths_a.front().size();
    std::size_t n_paths = paths_a.size();
    std::vector<double> sum(n_times, 0.0), sumsq(n_times, 0.0);
    for (std::size_t p = 0; p < n_paths; ++p) {
        if (paths_a[p].size() != n_times || paths_b[p].size() != n_times)
            throw std::invalid_argument("l1_distance: ragged path bundle");
        for (std::size_t t = 0; t < n_times; ++t) {
            double d = std::abs(paths_a[p][t] - paths_b[p][t]);
            sum[t] += d;
            sumsq[t] += d * d;
        }
    }
    L1Distance out;
    for (std::size_t t = 0; t < n_times; ++t) {
        double mean = sum[t] / static_cast<double>(n_paths);
        if (mean > out.value) {
            out.value = mean;
            out.argmax_index = static_cast<int>(t);
        }
    }
    double mean = sum[static_cast<std::size_t>(out.argmax_index)] / static_cast<double>(n_paths);
    double var = 0.0;
    if (n_paths > 1) {
        var = (sumsq[static_cast<std::size_t>(out.argmax_index)] -
               static_cast<double>(n_paths) * mean * mean) /
              static_cast<double>(n_paths - 1);
        var = std::max(var, 0.0);
    }
    out.standard_error = std::sqrt(var / static_cast<double>(n_paths));
    return out;
}

namespace {

struct TimeStats {
    std::vector<double> sum, sumsq;
    void init(std::size_t n) {
        sum.assign(n, 0.0);
        sumsq.assign(n, 0.0);
    }
    void add(const std::vector<double>& row) {
        for (std::size_t t = 0; t < row.size(); ++t) {
            sum[t] += row[t];
            sumsq[t] += row[t] * row[t];
        }
    }
    // sup over times of the mean, plus SE at the sup-attaining time.
    void sup_mean(int n_paths, double& value, double& se) const {
        value = 0.0;
        std::size_t arg = 0;
        for (std::size_t t = 0; t < sum.size(); ++t) {
            double mean = sum[t] / n_paths;
            if (mean >= value) {
                value = mean;
                arg = t;
            }
        }
        double mean = sum[arg] / n_paths;
        double var = 0.0;
        if (n_paths > 1)
            var = std::max(0.0, (sumsq[arg] - n_paths * mean * mean) / (n_paths - 1));
        se = std::sqrt(var / n_paths);
    }
};

}  // namespace

ConvergenceTable convergence_study(const Kernel& kernel, const ModelCoefficients& coeffs,
                                   const ConvergenceConfig& config) {
    if (config.n_list.empty()) throw std::invalid_argument("convergence_study: empty N list");
    for (std::size_t i = 1; i < config.n_list.size(); ++i)
        if (config.n_list[i] <= config.n_list[i - 1])
            throw std::invalid_argument("convergence_study: N list must be ascending");

    // Runs needed: every N plus its double (for the Cauchy column).
    std::set<int> run_set;
    for (int n : config.n_list) {
        run_set.insert(n);
        run_set.insert(2 * n);
    }
    std::vector<int> run_ns(run_set.begin(), run_set.end());
    int finest_steps = run_ns.back() * config.substeps;

    struct RunAccum {
        SchemeGrid grid;
        std::vector<double> times;
        TimeStats xi_moment, d_xi_xhat, d_xhat_xbar;
    };
    std::vector<RunAccum> accums(run_ns.size());
    for (std::size_t r = 0; r < run_ns.size(); ++r) {
        accums[r].grid = SchemeGrid{config.horizon, run_ns[r], config.substeps};
        int nf = accums[r].grid.fine_steps();
        accums[r].times.resize(static_cast<std::size_t>(nf) + 1);
        for (int j = 0; j <= nf; ++j) accums[r].times[static_cast<std::size_t>(j)] =
            accums[r].grid.fine_time(j);
        accums[r].xi_moment.init(static_cast<std::size_t>(nf) + 1);
        accums[r].d_xi_xhat.init(static_cast<std::size_t>(nf) + 1);
        accums[r].d_xhat_xbar.init(static_cast<std::size_t>(nf) + 1);
    }
    // Cauchy stats live on the coarser grid of each (N, 2N) pair.
    std::vector<TimeStats> cauchy(config.n_list.size());
    for (std::size_t i = 0; i < config.n_list.size(); ++i) {
        int nf = config.n_list[i] * config.substeps;
        cauchy[i].init(static_cast<std::size_t>(nf) + 1);
    }

    struct PathRows {
        bool flagged = false;
        std::vector<std::vector<double>> xi, dxh, dxb;  // per run
        std::vector<std::vector<double>> cauchy_rows;   // per n_list entry
        std::vector<std::vector<double>> xbar;          // per run, reused for cauchy
    };

    FineGrid noise_grid{config.horizon, finest_steps};
    int flagged = 0;
    const int chunk = 256;
    std::vector<PathRows> rows(static_cast<std::size_t>(std::min(chunk, config.n_paths)));

    for (int base = 0; base < config.n_paths; base += chunk) {
        int count = std::min(chunk, config.n_paths - base);
        parallel_for(count, config.threads, [&](int i) {
            PathRows& pr = rows[static_cast<std::size_t>(i)];
            pr = PathRows{};
            pr.xi.resize(run_ns.size());
            pr.dxh.resize(run_ns.size());
            pr.dxb.resize(run_ns.size());
            pr.xbar.resize(run_ns.size());
            pr.cauchy_rows.resize(config.n_list.size());
            DriverNoise fine = derive_path_noise(config.master_seed,
                                                 static_cast<std::uint64_t>(base + i), noise_grid,
                                                 config.driver);
            std::vector<SchemePath> paths(run_ns.size());
            for (std::size_t r = 0; r < run_ns.size(); ++r) {
                int factor = finest_steps / accums[r].grid.fine_steps();
                DriverNoise noise = factor > 1 ? aggregate_noise(fine, factor) : fine;
                paths[r] = run_split_path(kernel, coeffs, config.x0, accums[r].grid, noise);
                if (paths[r].flagged) {
                    pr.flagged = true;
                    return;
                }
            }
            for (std::size_t r = 0; r < run_ns.size(); ++r) {
                const auto& grid = accums[r].grid;
                const auto& times = accums[r].times;
                pr.xbar[r] = compute_barX(kernel, config.x0, paths[r].ledger, grid.horizon, times);
                std::size_t nt = times.size();
                pr.xi[r].resize(nt);
                pr.dxh[r].resize(nt);
                pr.dxb[r].resize(nt);
                for (std::size_t t = 0; t < nt; ++t) {
                    pr.xi[r][t] = paths[r].xi[t];
                    pr.dxh[r][t] = std::abs(paths[r].xi[t] - paths[r].xhat[t]);
                    pr.dxb[r][t] = std::abs(paths[r].xhat[t] - pr.xbar[r][t]);
                }
            }
            for (std::size_t i_n = 0; i_n < config.n_list.size(); ++i_n) {
                int n = config.n_list[i_n];
                std::size_t r_lo = static_cast<std::size_t>(
                    std::find(run_ns.begin(), run_ns.end(), n) - run_ns.begin());
                std::size_t r_hi = static_cast<std::size_t>(
                    std::find(run_ns.begin(), run_ns.end(), 2 * n) - run_ns.begin());
                const auto& times = accums[r_lo].times;
                auto xbar_hi = compute_barX(kernel, config.x0, paths[r_hi].ledger,
                                            accums[r_hi].grid.horizon, times);
                pr.cauchy_rows[i_n].resize(times.size());
                for (std::size_t t = 0; t < times.size(); ++t)
                    pr.cauchy_rows[i_n][t] = std::abs(xbar_hi[t] - pr.xbar[r_lo][t]);
            }
        });
        // Deterministic path-ordered reduction.
        for (int i = 0; i < count; ++i) {
            PathRows& pr = rows[static_cast<std::size_t>(i)];
            if (pr.flagged) {
                ++flagged;
                continue;
            }
            for (std::size_t r = 0; r < run_ns.size(); ++r) {
                accums[r].xi_moment.add(pr.xi[r]);
                accums[r].d_xi_xhat.add(pr.dxh[r]);
                accums[r].d_xhat_xbar.add(pr.dxb[r]);
            }
            for (std::size_t i_n = 0; i_n < config.n_list.size(); ++i_n)
                cauchy[i_n].add(pr.cauchy_rows[i_n]);
        }
    }

    ConvergenceTable table;
    table.flagged_paths = flagged;
    table.n_paths = config.n_paths;
    table.master_seed = config.master_seed;
    int used = config.n_paths - flagged;
    if (used < 1) throw std::runtime_error("convergence_study: all paths flagged");

    for (std::size_t i_n = 0; i_n < config.n_list.size(); ++i_n) {
        int n = config.n_list[i_n];
        std::size_t r = static_cast<std::size_t>(
            std::find(run_ns.begin(), run_ns.end(), n) - run_ns.begin());
        ConvergenceRow row;
        row.intervals = n;
        double se;
        accums[r].xi_moment.sup_mean(used, row.sup_moment, se);
        accums[r].d_xi_xhat.sup_mean(used, row.d_xi_xhat, se);
        accums[r].d_xhat_xbar.sup_mean(used, row.d_xhat_xbar, se);
        cauchy[i_n].sup_mean(used, row.d_xbar_cauchy, row.d_xbar_cauchy_se);
        table.rows.push_back(row);
    }
    for (std::size_t i = 1; i < table.rows.size(); ++i) {
        double tol = 2.0 * std::hypot(table.rows[i].d_xbar_cauchy_se,
                                      table.rows[i - 1].d_xbar_cauchy_se);
        if (table.rows[i].d_xbar_cauchy > table.rows[i - 1].d_xbar_cauchy + tol)
            table.cauchy_nonincreasing = false;
    }
    return table;
}

}  // namespace svj
