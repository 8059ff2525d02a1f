/* C API for the stochastic Volterra jump laboratory.
 *
 * All functions return 0 on success unless documented otherwise. Errors are
 * reported through negative codes plus a per-context message retrievable via
 * svj_last_error(). Handles are opaque; destroy everything you create.
 */
#ifndef SVJLAB_H
#define SVJLAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct svj_context svj_context;
typedef struct svj_kernel svj_kernel;

/* Error codes. */
#define SVJ_OK 0
#define SVJ_ERR_INVALID_ARG -1
#define SVJ_ERR_CONFIG -2
#define SVJ_ERR_RUNTIME -3

/* Run statuses returned by svj_run (non-negative). */
#define SVJ_RUN_OK 0
#define SVJ_RUN_CHECK_FAILED 1
#define SVJ_RUN_CONFIG_ERROR 2
#define SVJ_RUN_RUNTIME_ERROR 3

const char* svj_version(void);

svj_context* svj_context_create(void);
void svj_context_destroy(svj_context* ctx);

/* Message from the most recent failing call on this context. Never NULL. */
const char* svj_last_error(const svj_context* ctx);

/* Builds a sum-of-exponentials kernel sum_i w[i] * exp(-lam[i] * t). */
int svj_kernel_create_expsum(svj_context* ctx, const double* w, const double* lam, size_t n,
                             svj_kernel** out);

/* Builds a piecewise-linear kernel from samples at increasing times. */
int svj_kernel_create_sampled(svj_context* ctx, const double* times, const double* values,
                              size_t n, svj_kernel** out);

void svj_kernel_destroy(svj_kernel* kernel);

/* Evaluates the kernel or one of its first two derivatives at t >= 0. */
int svj_kernel_eval(svj_context* ctx, const svj_kernel* kernel, double t, int order,
                    double* out);

/* Compensator mass of the truncated stable jump measure, alpha in (1, 2). */
int svj_compensator_mass(svj_context* ctx, double alpha, double* out);

/* Runs one of the laboratory commands: "kernel-check", "simulate",
 * "converge", "laplace", "stable-test". config_json is the full JSON config;
 * outputs are written under out_dir. threads <= 0 means use all cores.
 * seed_override < 0 keeps the seed from the config.
 *
 * Returns an SVJ_RUN_* status (>= 0), or a negative SVJ_ERR_* code if the
 * arguments themselves are invalid.
 */
int svj_run(svj_context* ctx, const char* command, const char* config_json, const char* out_dir,
            int threads, int64_t seed_override);

#ifdef __cplusplus
}
#endif

#endif /* SVJLAB_H */
