#ifndef DYADLAB_H
#define DYADLAB_H

/* C interface to the dyadic analysis library.  Every entry point returns a
 * status code; on failure dyadlab_last_error() carries a message for the
 * calling thread.  Handles are opaque and freed with their _free function;
 * freeing NULL is a no-op. */

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dyadlab_status {
  DYADLAB_OK = 0,
  DYADLAB_ERR_INVALID = 1, /* bad argument or validation failure */
  DYADLAB_ERR_IO = 2,      /* file missing, unreadable, or malformed */
  DYADLAB_ERR_NUMERIC = 3, /* iterative solver failed to converge */
  DYADLAB_ERR_INTERNAL = 4
} dyadlab_status;

const char* dyadlab_last_error(void); /* thread-local; "" when clear */
const char* dyadlab_version(void);

typedef struct dyadlab_func dyadlab_func;       /* step function on a grid */
typedef struct dyadlab_weight dyadlab_weight;   /* positive weight + caches */
typedef struct dyadlab_symbols dyadlab_symbols; /* pair-indexed multiplier */
typedef struct dyadlab_config dyadlab_config;   /* key = value experiment config */

/* ---- step functions.  Grids are [0,1)^d at depth L, 1 <= d <= 4,
 * 2^{dL} <= 2^20; cells are row-major with coordinate 0 slowest. ---- */
dyadlab_status dyadlab_func_create(int d, int L, const double* cells, int64_t n,
                                   dyadlab_func** out);
dyadlab_status dyadlab_func_load(const char* path, dyadlab_func** out);
dyadlab_status dyadlab_func_save(const dyadlab_func* f, const char* path);
dyadlab_status dyadlab_func_dims(const dyadlab_func* f, int* d, int* L, int64_t* cells);
dyadlab_status dyadlab_func_values(const dyadlab_func* f, double* out, int64_t n);
void dyadlab_func_free(dyadlab_func* f);

/* Haar coefficients: mean plus 2^{dL} - 1 coefficients in canonical pair
 * order (level-major, cube morton, alpha ascending). */
dyadlab_status dyadlab_analyze(const dyadlab_func* f, double* mean, double* coeffs,
                               int64_t n);
dyadlab_status dyadlab_synthesize(int d, int L, double mean, const double* coeffs,
                                  int64_t n, dyadlab_func** out);

/* ---- weights; family is constant | step | power | cascade ---- */
dyadlab_status dyadlab_weight_generate(int d, int L, const char* family, double param,
                                       uint64_t seed, dyadlab_weight** out);
dyadlab_status dyadlab_weight_from_func(const dyadlab_func* cells, dyadlab_weight** out);
dyadlab_status dyadlab_weight_load(const char* path, dyadlab_weight** out);
dyadlab_status dyadlab_weight_save(const dyadlab_weight* w, const char* path);
dyadlab_status dyadlab_weight_a2(const dyadlab_weight* w, double* out);
void dyadlab_weight_free(dyadlab_weight* w);

/* ---- multiplier symbols ---- */
dyadlab_status dyadlab_symbols_constant(int d, int L, double value,
                                        dyadlab_symbols** out);
dyadlab_status dyadlab_symbols_random_signs(int d, int L, uint64_t seed,
                                            dyadlab_symbols** out);
dyadlab_status dyadlab_symbols_load(const char* path, int d, int L,
                                    dyadlab_symbols** out);
void dyadlab_symbols_free(dyadlab_symbols* s);

/* Norms of the nine paraproduct terms of the conjugated multiplier, then the
 * conjugated operator itself; out must hold 10 doubles in label order. */
dyadlab_status dyadlab_nine_term_norms(const dyadlab_weight* w,
                                       const dyadlab_symbols* sigma, double tol,
                                       uint64_t seed, double* out10);
const char* dyadlab_nine_term_label(int i); /* 0..8, NULL out of range */

/* ---- experiment configs and the command driver ---- */
dyadlab_status dyadlab_config_create(dyadlab_config** out);
dyadlab_status dyadlab_config_load(const char* path, dyadlab_config** out);
dyadlab_status dyadlab_config_set(dyadlab_config* c, const char* key,
                                  const char* value);
void dyadlab_config_free(dyadlab_config* c);

/* Runs verify | audit | norms | sweep | generate, writing result files under
 * out_dir ("." if NULL).  Progress lines go to log_fn without trailing
 * newline.  *out_exit receives the command's verdict: 0 pass, 1 an audited
 * assertion failed.  Usage or I/O trouble comes back as a non-OK status. */
typedef void (*dyadlab_log_fn)(const char* line, void* user);
dyadlab_status dyadlab_run(const dyadlab_config* c, const char* command,
                           const char* out_dir, dyadlab_log_fn log_fn, void* user,
                           int* out_exit);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* DYADLAB_H */
