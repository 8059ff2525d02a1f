#include "svjlab/svjlab.h"

#include <memory>
#include <string>

#include "svjlab/commands.hpp"
#include "svjlab/kernels.hpp"
#include "svjlab/levy.hpp"

struct svj_context {
    std::string last_error;
};

struct svj_kernel {
    std::unique_ptr<svj::Kernel> impl;
};

namespace {

int fail(svj_context* ctx, int code, const std::string& message) {
    if (ctx) ctx->last_error = message;
    return code;
}

}  // namespace

extern "C" {

const char* svj_version(void) { return svj::kVersion; }

svj_context* svj_context_create(void) { return new (std::nothrow) svj_context(); }

void svj_context_destroy(svj_context* ctx) { delete ctx; }

const char* svj_last_error(const svj_context* ctx) {
    return ctx ? ctx->last_error.c_str() : "null context";
}

int svj_kernel_create_expsum(svj_context* ctx, const double* w, const double* lam, size_t n,
                             svj_kernel** out) {
    if (!ctx || !w || !lam || !out || n == 0)
        return fail(ctx, SVJ_ERR_INVALID_ARG, "expsum kernel: null argument or empty arrays");
    try {
        auto kernel = std::make_unique<svj::ExpSumKernel>(std::vector<double>(w, w + n),
                                                          std::vector<double>(lam, lam + n));
        *out = new svj_kernel{std::move(kernel)};
        return SVJ_OK;
    } catch (const std::exception& e) {
        return fail(ctx, SVJ_ERR_CONFIG, e.what());
    }
}

int svj_kernel_create_sampled(svj_context* ctx, const double* times, const double* values,
                              size_t n, svj_kernel** out) {
    if (!ctx || !times || !values || !out || n < 2)
        return fail(ctx, SVJ_ERR_INVALID_ARG, "sampled kernel: need at least two samples");
    try {
        auto kernel = std::make_unique<svj::SampledKernel>(
            std::vector<double>(times, times + n), std::vector<double>(values, values + n));
        *out = new svj_kernel{std::move(kernel)};
        return SVJ_OK;
    } catch (const std::exception& e) {
        return fail(ctx, SVJ_ERR_CONFIG, e.what());
    }
}

void svj_kernel_destroy(svj_kernel* kernel) { delete kernel; }

int svj_kernel_eval(svj_context* ctx, const svj_kernel* kernel, double t, int order,
                    double* out) {
    if (!ctx || !kernel || !out)
        return fail(ctx, SVJ_ERR_INVALID_ARG, "kernel eval: null argument");
    try {
        *out = kernel->impl->eval(t, order);
        return SVJ_OK;
    } catch (const std::exception& e) {
        return fail(ctx, SVJ_ERR_INVALID_ARG, e.what());
    }
}

int svj_compensator_mass(svj_context* ctx, double alpha, double* out) {
    if (!ctx || !out) return fail(ctx, SVJ_ERR_INVALID_ARG, "compensator mass: null argument");
    try {
        *out = svj::compensator_mass(alpha);
        return SVJ_OK;
    } catch (const std::exception& e) {
        return fail(ctx, SVJ_ERR_INVALID_ARG, e.what());
    }
}

int svj_run(svj_context* ctx, const char* command, const char* config_json, const char* out_dir,
            int threads, int64_t seed_override) {
    if (!ctx || !command || !config_json || !out_dir)
        return fail(ctx, SVJ_ERR_INVALID_ARG, "run: null argument");
    svj::RunOptions options;
    options.out_dir = out_dir;
    options.threads = threads;
    options.seed_override = seed_override;
    std::string message;
    svj::RunStatus status = svj::run_command(command, config_json, options, &message);
    if (!message.empty()) ctx->last_error = message;
    return static_cast<int>(status);
}

}  // extern "C"
