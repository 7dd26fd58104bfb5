/* C API for the tnsign shared library.
 *
 * All functions return tnsign_status; on failure, tnsign_last_error()
 * returns a thread-local message describing what went wrong. Objects are
 * opaque handles that must be released with the matching _destroy call.
 */
#ifndef TNSIGN_H
#define TNSIGN_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tnsign_status {
  TNSIGN_OK = 0,
  TNSIGN_ERR_ARGUMENT = 1,
  TNSIGN_ERR_DIMENSION = 2,
  TNSIGN_ERR_SIZE_GUARD = 3,
  TNSIGN_ERR_CONFIG = 4,
  TNSIGN_ERR_FORMAT = 5,
  TNSIGN_ERR_IO = 6,
  TNSIGN_ERR_INTERNAL = 7,
} tnsign_status;

const char* tnsign_version(void);
const char* tnsign_status_name(tnsign_status s);
/* Thread-local message for the most recent failure. */
const char* tnsign_last_error(void);

/* ---- dense tensors ---- */

typedef struct tnsign_tensor tnsign_tensor;

tnsign_status tnsign_tensor_create(const int64_t* shape, int32_t rank,
                                   const double* re, const double* im /* NULL = real */,
                                   tnsign_tensor** out);
void tnsign_tensor_destroy(tnsign_tensor* t);
tnsign_status tnsign_tensor_rank(const tnsign_tensor* t, int32_t* out);
tnsign_status tnsign_tensor_shape(const tnsign_tensor* t, int64_t* shape_out);
tnsign_status tnsign_tensor_is_complex(const tnsign_tensor* t, int32_t* out);
/* Copies entries; im may be NULL for real tensors. */
tnsign_status tnsign_tensor_entries(const tnsign_tensor* t, double* re, double* im);
tnsign_status tnsign_tensor_contract(const tnsign_tensor* a, const int32_t* legs_a,
                                     int32_t n_legs, const tnsign_tensor* b,
                                     const int32_t* legs_b, tnsign_tensor** out);
tnsign_status tnsign_tensor_abs(const tnsign_tensor* t, tnsign_tensor** out);
/* Truncated SVD split across (left_legs | rest); sigma buffer must hold chi
 * entries, *kept receives the retained rank. */
tnsign_status tnsign_tensor_svd_split(const tnsign_tensor* t, const int32_t* left_legs,
                                      int32_t n_left, int64_t chi, double rel_tol,
                                      tnsign_tensor** left, tnsign_tensor** right,
                                      double* sigma, int64_t* kept,
                                      double* discarded_weight);

/* ---- lattice networks ---- */

typedef struct tnsign_network tnsign_network;

/* spec_json: {"kind": "orthogonal|unitary|gaussian_real|gaussian_complex",
 *   "D": 2, "lambda": 0.5, "target": "allones|rank1signed|rank1haar|positiverandom",
 *   "geometry": "open|cylinder", "rows": 3, "cols": 3, "seed": 1,
 *   "open_right_edge": false}  */
tnsign_status tnsign_network_sample(const char* spec_json, tnsign_network** out);
/* Double-layer PEPS norm network: {"D":2, "d":4, "rows":4, "cols":4,
 * "seed":1, "open_right_edge": false} */
tnsign_status tnsign_network_sample_peps(const char* spec_json, tnsign_network** out);
void tnsign_network_destroy(tnsign_network* n);
tnsign_status tnsign_network_abs(const tnsign_network* n, tnsign_network** out);
/* value = phase * exp(log_magnitude) */
tnsign_status tnsign_network_brute_force_value(const tnsign_network* n, double* log_magnitude,
                                               double* phase_re, double* phase_im);
tnsign_status tnsign_network_transfer_value(const tnsign_network* n, double* log_magnitude,
                                            double* phase_re, double* phase_im);
tnsign_status tnsign_network_to_json(const tnsign_network* n, char* buf, size_t buflen,
                                     size_t* needed);
tnsign_status tnsign_network_from_json(const char* text, tnsign_network** out);

/* ---- statmech models ---- */

typedef struct tnsign_model tnsign_model;

/* kind: "orthogonal" | "unitary" | "rank1" | "s4"; the last parameter is
 * lambda for the first three and the physical dimension d for "s4". */
tnsign_status tnsign_model_build(const char* kind, int64_t D, double lambda_or_d,
                                 tnsign_model** out);
void tnsign_model_destroy(tnsign_model* m);
tnsign_status tnsign_model_states(const tnsign_model* m, int64_t* q);
tnsign_status tnsign_model_predicted_entropy(const tnsign_model* m, int64_t W, int64_t H,
                                             const char* bc_top, const char* bc_bottom,
                                             double* predicted_s2, double* log_z_twisted,
                                             double* log_z_uniform);

/* ---- delta-f ---- */

tnsign_status tnsign_cylinder_delta_f(const char* ensemble_json, int64_t W, int64_t L,
                                      int64_t burn_in, double* delta_f, double* stderr_est);

/* ---- experiments ---- */

/* config_json uses the documented config schema; overrides already applied.
 * Writes the raw CSV and aggregate files next to it. */
tnsign_status tnsign_run_experiment(const char* config_json, int64_t* rows_written);
tnsign_status tnsign_emit_plot_data(const char* raw_csv, const char* style,
                                    const char* out_path);
tnsign_status tnsign_validate_config(const char* config_json);

#ifdef __cplusplus
}
#endif

#endif /* TNSIGN_H */
