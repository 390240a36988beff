/* C interface to the otcp library: transport-based multivariate conformal
 * prediction regions.
 *
 * All objects are opaque handles released with the matching *_free
 * function. Functions return OTCP_OK or an error status; the message for the
 * most recent failure on the calling thread is available from
 * otcp_last_error(). Output arrays are caller-allocated. Labels are 0-based.
 * Handles are immutable after creation and may be queried concurrently.
 */
#ifndef OTCP_OTCP_H
#define OTCP_OTCP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(OTCP_BUILDING_LIBRARY)
#    define OTCP_API __declspec(dllexport)
#  else
#    define OTCP_API __declspec(dllimport)
#  endif
#else
#  define OTCP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum otcp_status {
  OTCP_OK = 0,
  OTCP_INVALID_ARGUMENT = 1,
  OTCP_DIMENSION_MISMATCH = 2,
  OTCP_NON_FINITE_INPUT = 3,
  OTCP_INVALID_DIMENSION = 4,
  OTCP_INFEASIBLE_DUALS = 5,
  OTCP_LEVEL_OUT_OF_RANGE = 6,
  OTCP_CALIBRATION_TOO_SMALL = 7,
  OTCP_NEIGHBOR_COUNT_TOO_SMALL = 8,
  OTCP_INVALID_LABEL = 9,
  OTCP_SINGULAR_COVARIANCE = 10,
  OTCP_EMPTY_TEST_SET = 11,
  OTCP_TOO_FEW_TEST_POINTS = 12,
  OTCP_DEGENERATE_BOX = 13,
  OTCP_IO = 14,
  OTCP_MALFORMED_DATA = 15,
  OTCP_VERSION_MISMATCH = 16,
  OTCP_INVALID_CONFIG = 17,
  OTCP_INTERNAL = 99
} otcp_status;

typedef enum otcp_reference_kind {
  OTCP_REFERENCE_SPHERE = 0,
  OTCP_REFERENCE_ORTHANT = 1,
  /* Task default: sphere for regression, orthant for classification. */
  OTCP_REFERENCE_DEFAULT = -1
} otcp_reference_kind;

typedef enum otcp_method {
  OTCP_METHOD_OTCP = 0,
  OTCP_METHOD_OTCP_PLUS = 1,
  OTCP_METHOD_BALL = 2,
  OTCP_METHOD_RECT = 3,
  OTCP_METHOD_ELLIPSOID = 4,
  OTCP_METHOD_ADAPTIVE_ELLIPSOID = 5,
  OTCP_METHOD_IP = 6,
  OTCP_METHOD_MS = 7,
  OTCP_METHOD_APS = 8
} otcp_method;

OTCP_API const char* otcp_version(void);
OTCP_API const char* otcp_status_string(otcp_status status);
/* Message of the last failed call on this thread ("" if none). */
OTCP_API const char* otcp_last_error(void);
/* Command-line exit status for a status code (0 for OTCP_OK). */
OTCP_API int otcp_exit_code(otcp_status status);

/* ---- reference ranks ---------------------------------------------------- */

typedef struct otcp_reference otcp_reference;

OTCP_API otcp_status otcp_reference_create(otcp_reference_kind kind, size_t n, size_t d,
                                           uint64_t seed, otcp_reference** out);
OTCP_API size_t otcp_reference_size(const otcp_reference* ref);
OTCP_API size_t otcp_reference_dim(const otcp_reference* ref);
/* Copies the n x d row-major vectors. */
OTCP_API otcp_status otcp_reference_vectors(const otcp_reference* ref, double* out);
OTCP_API void otcp_reference_free(otcp_reference* ref);

/* ---- rank map ------------------------------------------------------------ */

typedef struct otcp_rank_map otcp_rank_map;

/* scores: n x d row-major, n equal to the reference size. */
OTCP_API otcp_status otcp_rank_map_fit(const double* scores, size_t n, size_t d,
                                       const otcp_reference* ref, otcp_rank_map** out);
/* Any of index, rank_norm, rank_vector (length d) may be NULL. */
OTCP_API otcp_status otcp_rank_map_evaluate(const otcp_rank_map* map, const double* s, size_t d,
                                            size_t* index, double* rank_norm, double* rank_vector);
/* permutation[i] = reference index matched to calibration score i. */
OTCP_API otcp_status otcp_rank_map_permutation(const otcp_rank_map* map, size_t* permutation);
OTCP_API otcp_status otcp_rank_map_potentials(const otcp_rank_map* map, double* psi, double* psi_star);
OTCP_API otcp_status otcp_rank_map_total_cost(const otcp_rank_map* map, double* cost);
/* New map with psi + c and psi_star - c. */
OTCP_API otcp_status otcp_rank_map_shift(const otcp_rank_map* map, double c, otcp_rank_map** out);
OTCP_API void otcp_rank_map_free(otcp_rank_map* map);

/* ---- quantile region ----------------------------------------------------- */

typedef struct otcp_region otcp_region;

/* Keeps the ceil(beta n) innermost ranks. */
OTCP_API otcp_status otcp_region_build(const otcp_rank_map* map, double beta, otcp_region** out);
OTCP_API otcp_status otcp_region_contains(const otcp_region* region, const double* s, size_t d,
                                          int* member);
OTCP_API size_t otcp_region_threshold_count(const otcp_region* region);
OTCP_API void otcp_region_free(otcp_region* region);

/* ---- calibrated predictors ---------------------------------------------- */

typedef struct otcp_params {
  otcp_method method;
  double alpha;      /* coverage level in (0, 1) */
  uint64_t seed;
  size_t k;          /* neighbors for local methods; 0 means ceil(0.1 n) */
  int reference;     /* otcp_reference_kind */
  int randomized;    /* randomized APS */
  int standardize;   /* standardize features for neighbor search */
} otcp_params;

/* Defaults: otcp, alpha 0.9, seed 0, k 0, task-default reference. */
OTCP_API void otcp_params_init(otcp_params* params);

typedef struct otcp_predictor otcp_predictor;

/* x: n x p (p may be 0 and x NULL), fhat and y: n x d. */
OTCP_API otcp_status otcp_predictor_fit_regression(const otcp_params* params, const double* x, size_t p,
                                                   const double* fhat, const double* y, size_t n,
                                                   size_t d, otcp_predictor** out);
/* probs: n x K rows on the simplex, labels in 0..K-1. */
OTCP_API otcp_status otcp_predictor_fit_classification(const otcp_params* params, const double* x,
                                                       size_t p, const double* probs,
                                                       const size_t* labels, size_t n, size_t num_classes,
                                                       otcp_predictor** out);
OTCP_API otcp_status otcp_predictor_contains(const otcp_predictor* pred, const double* x,
                                             const double* fhat, const double* y, int* member);
/* in_set: K flags; size may be NULL. */
OTCP_API otcp_status otcp_predictor_predict_set(const otcp_predictor* pred, const double* x,
                                                const double* pi, uint64_t query_id,
                                                unsigned char* in_set, size_t* size);
OTCP_API size_t otcp_predictor_threshold_count(const otcp_predictor* pred);
OTCP_API otcp_status otcp_predictor_save(const otcp_predictor* pred, const char* path);
OTCP_API otcp_status otcp_predictor_load(const char* path, otcp_predictor** out);
OTCP_API void otcp_predictor_free(otcp_predictor* pred);

/* ---- file workflows ------------------------------------------------------ */

typedef struct otcp_config otcp_config;

OTCP_API otcp_status otcp_config_create(otcp_config** out);
/* Keys: method, methods, alpha, seed ("random" allowed), k, reference,
 * score, randomized, standardize, in, test, out, artifact, scenario, n_cal,
 * n_test, classes, separation, mc_samples, bins, bin_lo, bin_hi, metrics.
 * Later calls override earlier ones. */
OTCP_API otcp_status otcp_config_set(otcp_config* cfg, const char* key, const char* value);
OTCP_API otcp_status otcp_config_load_file(otcp_config* cfg, const char* path);
/* command: "simulate", "calibrate", "predict" or "evaluate". */
OTCP_API otcp_status otcp_run(otcp_config* cfg, const char* command);
/* key=value summary of the last successful otcp_run on this config. */
OTCP_API const char* otcp_config_output(const otcp_config* cfg);
OTCP_API void otcp_config_free(otcp_config* cfg);

#ifdef __cplusplus
}
#endif

#endif /* OTCP_OTCP_H */
