#ifndef SRQE_CAPI_H
#define SRQE_CAPI_H

/* C interface to the srqe library: opaque handles + status codes.
 *
 * Every function returns srqe_status; results go through out-parameters.
 * On failure the thread-local message from srqe_last_error() describes
 * the problem. Handles are freed with their matching _free function
 * (NULL is ignored). Strings returned through char** out-parameters are
 * owned by the caller and released with srqe_string_free.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SRQE_API __declspec(dllexport)
#else
#define SRQE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum srqe_status {
  SRQE_OK = 0,
  SRQE_ERR_DOMAIN = 1,   /* invalid mathematical input */
  SRQE_ERR_CONFIG = 2,   /* inconsistent model / experiment configuration */
  SRQE_ERR_RESOURCE = 3, /* budget exceeded (memory, dimension, iterations) */
  SRQE_ERR_NUMERIC = 4,  /* no convergence / refused to produce garbage */
  SRQE_ERR_RANGE = 5,    /* query outside the computed range */
  SRQE_ERR_IO = 6,       /* file system failure */
  SRQE_ERR_BADHANDLE = 7 /* NULL or mismatched handle */
} srqe_status;

SRQE_API const char* srqe_version(void);
SRQE_API const char* srqe_last_error(void);
SRQE_API void srqe_string_free(char* s);

/* Number of worker threads for internal parallel loops (results are
 * deterministic for any count; 1 is the default). */
SRQE_API srqe_status srqe_set_threads(int n);

/* ---------------- exact spectrum of the flat model ---------------- */

typedef struct srqe_spectrum srqe_spectrum;

SRQE_API srqe_status srqe_spectrum_enumerate(double lambda_max, srqe_spectrum** out);
SRQE_API void srqe_spectrum_free(srqe_spectrum* s);
SRQE_API srqe_status srqe_spectrum_counting(const srqe_spectrum* s, double lambda, int64_t* out);
SRQE_API srqe_status srqe_spectrum_size(const srqe_spectrum* s, int64_t* out_entries);
SRQE_API srqe_status srqe_spectrum_write_csv(const srqe_spectrum* s, const char* path);
SRQE_API srqe_status srqe_spectrum_weyl_fit(const srqe_spectrum* s, double lambda_lo,
                                            double lambda_hi, double* out_C, double* out_exponent,
                                            double* out_r2);

SRQE_API srqe_status srqe_heat_trace(double t, double tol, double* out);
SRQE_API srqe_status srqe_gaveau_kernel(double x, double y, double z, double t, double tol,
                                        double* out);

/* ------------------- models and discretizations ------------------- */

typedef struct srqe_model srqe_model;
typedef struct srqe_operator srqe_operator;

SRQE_API srqe_status srqe_model_from_json(const char* json_text, srqe_model** out);
SRQE_API void srqe_model_free(srqe_model* m);
SRQE_API srqe_status srqe_model_popp_volume(const srqe_model* m, int quad_n, double* out);

SRQE_API srqe_status srqe_build_sector(const srqe_model* m, int vertical_mode, int n_grid,
                                       srqe_operator** out);
SRQE_API srqe_status srqe_build_torus(const srqe_model* m, int n_grid, srqe_operator** out);
SRQE_API srqe_status srqe_build_full3d(const srqe_model* m, int n_grid, srqe_operator** out);
SRQE_API void srqe_operator_free(srqe_operator* op);
SRQE_API srqe_status srqe_operator_dim(const srqe_operator* op, int64_t* out);
SRQE_API srqe_status srqe_operator_nnz(const srqe_operator* op, int64_t* out);
SRQE_API srqe_status srqe_operator_write_matrix_market(const srqe_operator* op, const char* path);

/* --------------------------- eigensolver --------------------------- */

typedef struct srqe_eigs srqe_eigs;

SRQE_API srqe_status srqe_lanczos_lowest(const srqe_operator* op, int k, double tol, int max_iter,
                                         uint64_t seed, srqe_eigs** out);
SRQE_API srqe_status srqe_dense_eig(const srqe_operator* op, srqe_eigs** out);
SRQE_API void srqe_eigs_free(srqe_eigs* e);
SRQE_API srqe_status srqe_eigs_count(const srqe_eigs* e, int64_t* out);
SRQE_API srqe_status srqe_eigs_value(const srqe_eigs* e, int64_t i, double* out);
SRQE_API srqe_status srqe_eigs_residual(const srqe_eigs* e, int64_t i, double* out);

/* ------------------------ gauge invariance ------------------------ */

/* h_json: Fourier series array, same schema as the model's density_h. */
SRQE_API srqe_status srqe_gauge_check(const srqe_model* m, const char* h_json, int n_grid,
                                      double* out_max_deviation);

/* ------------------- KvN density-one extraction ------------------- */

/* kept_mask must hold n bytes; set to 0/1 per index. */
SRQE_API srqe_status srqe_kvn_extract(const double* values, int64_t n, uint8_t* kept_mask,
                                      double* out_density);

/* ----------------------- normal form algebra ----------------------- */

typedef struct srqe_symbol srqe_symbol;

SRQE_API srqe_status srqe_symbol_parse(const char* text, int truncation, srqe_symbol** out);
SRQE_API void srqe_symbol_free(srqe_symbol* s);
SRQE_API srqe_status srqe_symbol_text(const srqe_symbol* s, char** out_text);
SRQE_API srqe_status srqe_symbol_poisson(const srqe_symbol* f, const srqe_symbol* g,
                                         srqe_symbol** out);
/* mode: "semiglobal" or "local"; returns the normal form and the
 * generator texts as one newline-separated string. */
SRQE_API srqe_status srqe_birkhoff_normalize(const srqe_symbol* h, int order, const char* mode,
                                             srqe_symbol** out_normal_form,
                                             char** out_generators_text);

/* ------------------------ experiment runner ------------------------ */

/* Runs a full experiment from a JSON config (see the README schema);
 * writes artifacts + manifest.json under the config's output_dir (or the
 * override when non-NULL). out_manifest receives the manifest JSON (or
 * the error JSON). Returns SRQE_OK, SRQE_ERR_CONFIG or SRQE_ERR_NUMERIC. */
SRQE_API srqe_status srqe_run_experiment(const char* config_json, const char* output_dir_override,
                                         char** out_manifest);

#ifdef __cplusplus
}
#endif

#endif /* SRQE_CAPI_H */
