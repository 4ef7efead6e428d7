#ifndef HRCL_H
#define HRCL_H

/* C interface of the hrcl library.
 *
 * Every fallible call returns an hrcl_status. On failure, hrcl_last_error() describes the
 * problem and, for configuration errors, hrcl_last_error_key() names the offending key.
 * Both are thread-local and stay valid until the next failing call on the same thread.
 *
 * String outputs use caller buffers: `needed` (if non-null) receives the full length
 * including the terminating NUL; the call fails with HRCL_INVALID_ARGUMENT when `capacity`
 * is too small (a null buffer with capacity 0 is a valid size query). */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define HRCL_API __declspec(dllexport)
#else
#define HRCL_API __attribute__((visibility("default")))
#endif

typedef enum hrcl_status {
    HRCL_OK = 0,
    HRCL_INVALID_ARGUMENT = 1,
    HRCL_CONFIG_ERROR = 2,
    HRCL_RUNTIME_ERROR = 3
} hrcl_status;

typedef struct hrcl_config hrcl_config;

HRCL_API const char* hrcl_version(void);
HRCL_API const char* hrcl_last_error(void);
HRCL_API const char* hrcl_last_error_key(void);
/* Name of the environment variable holding the default output root. */
HRCL_API const char* hrcl_output_root_env(void);

/* ---- configuration ---- */

HRCL_API hrcl_status hrcl_config_new(hrcl_config** out);
HRCL_API void hrcl_config_free(hrcl_config* config);
/* Parses key = value text on top of the current values. */
HRCL_API hrcl_status hrcl_config_parse(hrcl_config* config, const char* text);
HRCL_API hrcl_status hrcl_config_load_file(hrcl_config* config, const char* path);
HRCL_API hrcl_status hrcl_config_set(hrcl_config* config, const char* key, const char* value);
HRCL_API hrcl_status hrcl_config_get(const hrcl_config* config, const char* key, char* buffer, size_t capacity,
                                     size_t* needed);
/* Canonical config text (loadable again). */
HRCL_API hrcl_status hrcl_config_dump(const hrcl_config* config, char* buffer, size_t capacity, size_t* needed);
HRCL_API hrcl_status hrcl_config_validate(const hrcl_config* config);

HRCL_API size_t hrcl_config_key_count(void);
/* NULL when index is out of range. */
HRCL_API const char* hrcl_config_key_name(size_t index);
HRCL_API const char* hrcl_config_key_section(size_t index);
HRCL_API const char* hrcl_config_key_help(size_t index);

/* ---- commands ---- */

/* <output_root>/<run name>; output_root may be NULL or empty to use the environment / "runs". */
HRCL_API hrcl_status hrcl_resolve_run_dir(const hrcl_config* config, const char* output_root, char* buffer,
                                          size_t capacity, size_t* needed);

HRCL_API hrcl_status hrcl_generate(const hrcl_config* config, const char* directory);
/* All methods and seeds of the config (and its sweep, if any) into `directory`. */
HRCL_API hrcl_status hrcl_run(const hrcl_config* config, const char* directory);
/* Like hrcl_run; every configured method must train a policy. */
HRCL_API hrcl_status hrcl_train(const hrcl_config* config, const char* directory);
/* Like hrcl_run; sweep_param and sweep_values must be set. */
HRCL_API hrcl_status hrcl_sweep(const hrcl_config* config, const char* directory);
HRCL_API hrcl_status hrcl_eval(const hrcl_config* config, const char* checkpoint, const char* directory,
                               double* mean_combined);
HRCL_API hrcl_status hrcl_oracle(const hrcl_config* config, const char* directory, double* oracle_cost,
                                 double* epos_cost);
HRCL_API hrcl_status hrcl_plot_data(const char* run_directory, const char* output_path);

/* ---- direct solvers ---- */

typedef struct hrcl_epos_params {
    int iterations;   /* L */
    int guard;        /* nonzero: revert iterations that raise inefficiency */
    int approval;     /* 0 sequential, 1 independent, 2 joint */
    int variance;     /* nonzero: variance inefficiency, else RMSE */
    double sigma1;
    double sigma2;
} hrcl_epos_params;

HRCL_API void hrcl_epos_params_default(hrcl_epos_params* params);

/* One period of plan selection.
 *   values      agents * plans * dim, row-major [agent][plan][d]
 *   discomfort  agents * plans
 *   target      dim
 *   betas       agents
 *   selections  out, agents plan indices (into the caller's plan order)
 *   trace       out, optional, params->iterations inefficiency values
 *   inefficiency out, optional, final inefficiency */
HRCL_API hrcl_status hrcl_epos_solve(size_t agents, size_t plans, size_t dim, const double* values,
                                     const double* discomfort, const double* target, const double* betas,
                                     const hrcl_epos_params* params, size_t* selections, double* trace,
                                     double* inefficiency);

/* Exhaustive minimum of the selection objective (at most 1e6 combinations). */
HRCL_API hrcl_status hrcl_oracle_solve(size_t agents, size_t plans, size_t dim, const double* values,
                                       const double* discomfort, const double* target, const double* betas,
                                       const hrcl_epos_params* params, size_t* selections, double* cost,
                                       double* inefficiency);

#ifdef __cplusplus
}
#endif

#endif
