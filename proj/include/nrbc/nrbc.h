#ifndef NRBC_NRBC_H
#define NRBC_NRBC_H

#include <stddef.h>

#if defined(_WIN32)
#define NRBC_API __declspec(dllexport)
#else
#define NRBC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nrbc_status {
    NRBC_OK = 0,
    NRBC_ERR_DOMAIN = 1,
    NRBC_ERR_ACCURACY = 2,
    NRBC_ERR_CONVERGENCE = 3,
    NRBC_ERR_CONFIG = 4,
    NRBC_ERR_INTEGRATION = 5,
    NRBC_ERR_IO = 6,
    NRBC_ERR_RESOLUTION = 7,
    NRBC_ERR_INVALID_ARGUMENT = 8,
    NRBC_ERR_INTERNAL = 9
} nrbc_status;

/* Message for the last failure on the calling thread; empty after success. */
NRBC_API const char* nrbc_last_error(void);
NRBC_API const char* nrbc_status_string(nrbc_status status);
NRBC_API const char* nrbc_version(void);

/* Complex zeros of K_n (half_order = 0) or K_{n+1/2} (half_order = 1). */
typedef struct nrbc_zeroset nrbc_zeroset;

NRBC_API int nrbc_zero_count(int half_order, int n);
NRBC_API nrbc_status nrbc_zeros_find(int half_order, int n, double tol, nrbc_zeroset** out);
NRBC_API size_t nrbc_zeros_size(const nrbc_zeroset* z);
NRBC_API nrbc_status nrbc_zeros_get(const nrbc_zeroset* z, size_t j, double* re, double* im, double* residual);
NRBC_API void nrbc_zeros_free(nrbc_zeroset* z);

/* Boundary kernels sigma and omega for mode n on a circle (d = 2) or sphere (d = 3) of radius b. */
typedef struct nrbc_kernel nrbc_kernel;

NRBC_API nrbc_status nrbc_kernel_build(int d, int n, double b, double c, nrbc_kernel** out);
NRBC_API nrbc_status nrbc_kernel_sigma(const nrbc_kernel* k, double t, double* out);
NRBC_API nrbc_status nrbc_kernel_omega(const nrbc_kernel* k, double t, double* out);
NRBC_API size_t nrbc_kernel_pole_count(const nrbc_kernel* k);
NRBC_API size_t nrbc_kernel_node_count(const nrbc_kernel* k);
NRBC_API nrbc_status nrbc_kernel_write_csv(const nrbc_kernel* k, const double* times, size_t count, const char* path);
NRBC_API void nrbc_kernel_free(nrbc_kernel* k);

/* Recursive convolution with a kernel; the kernel may be freed afterwards. */
typedef struct nrbc_convolver nrbc_convolver;

NRBC_API nrbc_status nrbc_convolver_create(const nrbc_kernel* k, nrbc_convolver** out);
NRBC_API nrbc_status nrbc_convolver_step(nrbc_convolver* cv, double g_left, double g_right, double dt, double* out);
NRBC_API nrbc_status nrbc_convolver_history(const nrbc_convolver* cv, double dt, double* out);
NRBC_API double nrbc_convolver_time(const nrbc_convolver* cv);
NRBC_API size_t nrbc_convolver_state_count(const nrbc_convolver* cv);
NRBC_API void nrbc_convolver_reset(nrbc_convolver* cv);
NRBC_API void nrbc_convolver_free(nrbc_convolver* cv);

/* Experiment configuration in the key = value grammar. */
typedef struct nrbc_config nrbc_config;

NRBC_API size_t nrbc_experiment_count(void);
NRBC_API const char* nrbc_experiment_id(size_t i);
NRBC_API size_t nrbc_config_key_count(void);
NRBC_API const char* nrbc_config_key(size_t i);

NRBC_API nrbc_status nrbc_config_create(const char* experiment, nrbc_config** out);
NRBC_API nrbc_status nrbc_config_load_file(nrbc_config* cfg, const char* path);
NRBC_API nrbc_status nrbc_config_set(nrbc_config* cfg, const char* key, const char* value);
NRBC_API nrbc_status nrbc_config_validate(const nrbc_config* cfg);
/* Writes the resolved configuration; *needed receives the full length including the terminator. */
NRBC_API nrbc_status nrbc_config_text(const nrbc_config* cfg, char* buf, size_t cap, size_t* needed);
NRBC_API void nrbc_config_free(nrbc_config* cfg);

/* Result of one experiment run: gates, reported metrics and written files. */
typedef struct nrbc_report nrbc_report;

NRBC_API nrbc_status nrbc_run_experiment(const nrbc_config* cfg, nrbc_report** out);
NRBC_API int nrbc_report_passed(const nrbc_report* r);
NRBC_API double nrbc_report_seconds(const nrbc_report* r);
NRBC_API size_t nrbc_report_gate_count(const nrbc_report* r);
NRBC_API nrbc_status nrbc_report_gate(const nrbc_report* r, size_t i, const char** name, double* value,
                                      const char** relation, double* limit, int* pass);
NRBC_API size_t nrbc_report_metric_count(const nrbc_report* r);
NRBC_API nrbc_status nrbc_report_metric(const nrbc_report* r, size_t i, const char** key, const char** value);
NRBC_API size_t nrbc_report_file_count(const nrbc_report* r);
NRBC_API const char* nrbc_report_file(const nrbc_report* r, size_t i);
NRBC_API void nrbc_report_free(nrbc_report* r);

#ifdef __cplusplus
}
#endif

#endif
