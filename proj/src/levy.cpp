#include "svjlab/levy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace svj {

double compensator_mass(double alpha) {
    if (!(alpha > 1.0 && alpha < 2.0))
        throw std::invalid_argument("compensator_mass: alpha in (1,2) required");
    return 1.0 / (2.0 - alpha) + 1.0 / (alpha - 1.0);
}

double sample_stable_increment(const StableDriverParams& params, double dt, Rng& rng) {
    if (!(dt > 0.0)) throw std::invalid_argument("sample_stable_increment: dt > 0 required");
    const double alpha = params.alpha;
    if (!(alpha > 1.0 && alpha < 2.0))
        throw std::invalid_argument("sample_stable_increment: alpha in (1,2) required");
    // Chambers-Mallows-Stuck for S_alpha(1, beta=1, 0): zero mean for alpha > 1,
    // Laplace transform E[e^{-lambda X}] = exp(lambda^alpha / cos(pi(2-alpha)/2)).
    double tan_half = std::tan(0.5 * M_PI * alpha);
    double b = std::atan(tan_half) / alpha;
    double s = std::pow(1.0 + tan_half * tan_half, 0.5 / alpha);
    double v = rng.uniform(-0.5 * M_PI, 0.5 * M_PI);
    double w = rng.exponential();
    double x = s * std::sin(alpha * (v + b)) / std::pow(std::cos(v), 1.0 / alpha) *
               std::pow(std::cos(v - alpha * (v + b)) / w, (1.0 - alpha) / alpha);
    return std::pow(dt, 1.0 / alpha) * x;
}

JumpStream sample_large_jumps(const StableDriverParams& params, double horizon, Rng& rng) {
    const double alpha = params.alpha;
    const double eps = params.jump_threshold;
    if (!(eps > 0.0)) throw std::invalid_argument("sample_large_jumps: threshold > 0 required");

    JumpStream stream;
    stream.compensator_drift = std::pow(eps, 1.0 - alpha) / (alpha - 1.0);
    double rate = std::pow(eps, -alpha) / alpha;  // nu([eps, inf))

    // Homogeneous Poisson arrivals, inverse-CDF sizes u = eps (1-V)^{-1/alpha}.
    double t = 0.0;
    while (true) {
        t += rng.exponential() / rate;
        if (t > horizon) break;
        stream.times.push_back(t);
        stream.sizes.push_back(eps * std::pow(1.0 - rng.uniform(), -1.0 / alpha));
    }
    return stream;
}

DriverNoise derive_path_noise(std::uint64_t master_seed, std::uint64_t path_index,
                              const FineGrid& grid, const StableDriverParams& params) {
    if (grid.steps < 1) throw std::invalid_argument("derive_path_noise: grid needs >= 1 step");
    DriverNoise noise;
    noise.seed = derive_stream_seed(master_seed, path_index);
    noise.mode = params.mode;
    noise.horizon = grid.horizon;
    Rng rng(noise.seed);

    double h = grid.dt();
    double sqrt_h = std::sqrt(h);
    noise.brownian.resize(static_cast<std::size_t>(grid.steps));
    for (auto& db : noise.brownian) db = sqrt_h * rng.normal();

    if (params.mode == DriverMode::ExactIncrement) {
        noise.stable.resize(static_cast<std::size_t>(grid.steps));
        for (auto& dl : noise.stable) dl = sample_stable_increment(params, h, rng);
    } else {
        noise.jumps = sample_large_jumps(params, grid.horizon, rng);
    }
    return noise;
}

DriverNoise aggregate_noise(const DriverNoise& fine, int factor) {
    if (factor < 1 || fine.brownian.size() % static_cast<std::size_t>(factor) != 0)
        throw std::invalid_argument("aggregate_noise: factor must divide the fine step count");
    DriverNoise coarse;
    coarse.seed = fine.seed;
    coarse.mode = fine.mode;
    coarse.horizon = fine.horizon;
    coarse.jumps = fine.jumps;

    std::size_t n = fine.brownian.size() / static_cast<std::size_t>(factor);
    coarse.brownian.assign(n, 0.0);
    for (std::size_t i = 0; i < fine.brownian.size(); ++i)
        coarse.brownian[i / static_cast<std::size_t>(factor)] += fine.brownian[i];
    if (!fine.stable.empty()) {
        coarse.stable.assign(n, 0.0);
        for (std::size_t i = 0; i < fine.stable.size(); ++i)
            coarse.stable[i / static_cast<std::size_t>(factor)] += fine.stable[i];
    }
    return coarse;
}

}  // namespace svj
