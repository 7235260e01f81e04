/* dtr — debiased and threshold ridge regression with dependent wild
 * bootstrap inference.
 *
 * C API of the shared library. All functions return a dtr_status; outputs
 * are written through pointers. Objects are opaque handles released with
 * the matching _free function (free functions accept NULL). Error details
 * for the calling thread are available via dtr_last_error().
 *
 * Matrices cross the boundary as dense row-major double arrays.
 */

#ifndef DTR_H
#define DTR_H

#include <stdint.h>

#if defined(_WIN32)
#define DTR_API __declspec(dllexport)
#else
#define DTR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dtr_status {
  DTR_OK = 0,
  DTR_ERR_NULL_POINTER = 1,
  DTR_ERR_INVALID_ARGUMENT = 2,
  DTR_ERR_NON_FINITE = 3,
  DTR_ERR_RANK_DEFICIENT = 4,
  DTR_ERR_DIMENSION_MISMATCH = 5,
  DTR_ERR_NOT_PSD = 6,
  DTR_ERR_EMPTY_INPUT = 7,
  DTR_ERR_TOO_SHORT = 8,
  DTR_ERR_FOLD_RANK_DEFICIENT = 9,
  DTR_ERR_P_TOO_SMALL = 10,
  DTR_ERR_IO = 11,
  DTR_ERR_INTERNAL = 12
} dtr_status;

typedef enum dtr_method {
  DTR_METHOD_DEPENDENT_WILD = 0,
  DTR_METHOD_EFRON = 1,
  DTR_METHOD_IID_WILD = 2
} dtr_method;

DTR_API const char* dtr_version(void);
DTR_API const char* dtr_status_name(dtr_status status);
/* Message of the most recent failure on the calling thread ("" if none). */
DTR_API const char* dtr_last_error(void);

/* ---- dense matrices ---------------------------------------------------- */

typedef struct dtr_matrix dtr_matrix;

/* data may be NULL for a zero matrix; otherwise rows*cols row-major. */
DTR_API dtr_status dtr_matrix_create(int64_t rows, int64_t cols,
                                     const double* data, dtr_matrix** out);
DTR_API dtr_status dtr_matrix_read_csv(const char* path, dtr_matrix** out);
DTR_API dtr_status dtr_matrix_write_csv(const dtr_matrix* m, const char* path);
DTR_API int64_t dtr_matrix_rows(const dtr_matrix* m);
DTR_API int64_t dtr_matrix_cols(const dtr_matrix* m);
/* Copies the matrix into buffer (rows*cols doubles, row-major). */
DTR_API dtr_status dtr_matrix_copy_data(const dtr_matrix* m, double* buffer);
DTR_API void dtr_matrix_free(dtr_matrix* m);

/* ---- design with cached thin SVD --------------------------------------- */

typedef struct dtr_design dtr_design;

DTR_API dtr_status dtr_design_create(const dtr_matrix* x, dtr_design** out);
DTR_API int64_t dtr_design_n(const dtr_design* d);
DTR_API int64_t dtr_design_p(const dtr_design* d);
DTR_API dtr_status dtr_design_min_singular_value(const dtr_design* d,
                                                 double* out);
/* Copies the p singular values (descending) into buffer. */
DTR_API dtr_status dtr_design_singular_values(const dtr_design* d,
                                              double* buffer);
DTR_API void dtr_design_free(dtr_design* d);

/* ---- ridge -> debias -> threshold fit ---------------------------------- */

typedef struct dtr_fit dtr_fit;

DTR_API dtr_status dtr_fit_create(const dtr_design* d, const double* y,
                                  int64_t n, double rho, double threshold,
                                  dtr_fit** out);
/* Each getter copies a length-p (residuals: length-n) vector. */
DTR_API dtr_status dtr_fit_beta_star(const dtr_fit* f, double* buffer);
DTR_API dtr_status dtr_fit_beta_tilde(const dtr_fit* f, double* buffer);
DTR_API dtr_status dtr_fit_beta_hat(const dtr_fit* f, double* buffer);
DTR_API dtr_status dtr_fit_residuals(const dtr_fit* f, double* buffer);
DTR_API int64_t dtr_fit_selected_count(const dtr_fit* f);
/* Copies the selected indices (0-based, ascending). */
DTR_API dtr_status dtr_fit_selected(const dtr_fit* f, int64_t* buffer);
DTR_API void dtr_fit_free(dtr_fit* f);

/* ---- linear combinations gamma = M beta --------------------------------- */

typedef struct dtr_combination dtr_combination;

DTR_API dtr_status dtr_combination_create(const dtr_fit* f,
                                          const dtr_matrix* m,
                                          dtr_combination** out);
DTR_API int64_t dtr_combination_p1(const dtr_combination* c);
DTR_API dtr_status dtr_combination_gamma_hat(const dtr_combination* c,
                                             double* buffer);
DTR_API dtr_status dtr_combination_tau_hat(const dtr_combination* c,
                                           double* buffer);
DTR_API dtr_status dtr_combination_empty_selection(const dtr_combination* c,
                                                   int* out);
DTR_API void dtr_combination_free(dtr_combination* c);

/* ---- bootstrap inference ------------------------------------------------ */

typedef struct dtr_bootstrap dtr_bootstrap;

/* Gaussian-kernel dependent wild bootstrap (or the Efron / i.i.d. wild
 * baselines; those ignore k_n). threads <= 0 uses all cores; results are
 * identical for every thread count. */
DTR_API dtr_status dtr_bootstrap_run(const dtr_design* d, const double* y,
                                     int64_t n, double rho, double threshold,
                                     const dtr_matrix* m, dtr_method method,
                                     double k_n, int64_t replicates,
                                     double alpha, uint64_t seed, int threads,
                                     dtr_bootstrap** out);
DTR_API int64_t dtr_bootstrap_replicates(const dtr_bootstrap* b);
DTR_API dtr_status dtr_bootstrap_quantile(const dtr_bootstrap* b, double* out);
/* Copies the replicate statistics delta*_b (length = replicates). */
DTR_API dtr_status dtr_bootstrap_deltas(const dtr_bootstrap* b,
                                        double* buffer);
DTR_API void dtr_bootstrap_free(dtr_bootstrap* b);

/* Per-coordinate 1-alpha intervals: lower/upper get p1 entries. */
DTR_API dtr_status dtr_confidence_intervals(const dtr_combination* c,
                                            const dtr_bootstrap* b,
                                            double* lower, double* upper);
/* Simultaneous test of gamma = z; reject is 0/1. */
DTR_API dtr_status dtr_hypothesis_test(const dtr_combination* c,
                                       const dtr_bootstrap* b, const double* z,
                                       int64_t p1, double* statistic,
                                       int* reject);

/* ---- hyperparameter tuning ---------------------------------------------- */

typedef struct dtr_tune_result dtr_tune_result;

/* Ten-fold style CV over the (rho, threshold) grid. Pass n_rhos = 0 and/or
 * n_thresholds = 0 to use the built-in default grids. contiguous_folds != 0
 * keeps folds as contiguous row blocks (recommended for dependent errors). */
DTR_API dtr_status dtr_cv_select(const dtr_matrix* x, const double* y,
                                 int64_t n, const double* rhos, int64_t n_rhos,
                                 const double* thresholds,
                                 int64_t n_thresholds, int folds,
                                 int contiguous_folds, uint64_t seed,
                                 int threads, dtr_tune_result** out);
DTR_API dtr_status dtr_tune_rho(const dtr_tune_result* t, double* out);
DTR_API dtr_status dtr_tune_threshold(const dtr_tune_result* t, double* out);
DTR_API dtr_status dtr_tune_score(const dtr_tune_result* t, double* out);
DTR_API int64_t dtr_tune_table_size(const dtr_tune_result* t);
/* Copies the CV table as 4 columns (rho, threshold, fold, score) per row. */
DTR_API dtr_status dtr_tune_table(const dtr_tune_result* t, double* buffer);
DTR_API void dtr_tune_result_free(dtr_tune_result* t);

/* Flat-top bandwidth rule on fitted residuals. degenerate is set to 1 for
 * zero-variance residuals (k_n falls back to 1). */
DTR_API dtr_status dtr_select_bandwidth(const double* residuals, int64_t n,
                                        double* k_n, int64_t* m_hat,
                                        int* degenerate);

/* ---- simulation experiments --------------------------------------------- */

typedef struct dtr_experiment dtr_experiment;

typedef struct dtr_experiment_config {
  int64_t n;
  int64_t p;
  int64_t p1;
  double z_decay;
  uint64_t seed;
  int64_t n_sims;
  int64_t replicates;
  double alpha;
  /* Bitmask of methods: bit i set runs method i (dtr_method values). */
  unsigned methods;
  double scale_factor; /* in (0, 1]; scales n, p, n_sims, replicates */
  double rho;          /* NaN -> one-shot CV */
  double threshold;    /* NaN -> one-shot CV */
  double k_n;          /* <= 0 -> flat-top rule per realization */
  int threads;         /* <= 0 -> all cores */
  int64_t sigma_draws; /* 0, or >= 1000 to add a covariance replay */
} dtr_experiment_config;

/* Fills cfg with defaults (NaN hyperparameters, dwb only, alpha 0.1). */
DTR_API void dtr_experiment_config_init(dtr_experiment_config* cfg);
DTR_API dtr_status dtr_experiment_run(const dtr_experiment_config* cfg,
                                      dtr_experiment** out);
DTR_API dtr_status dtr_experiment_write_metrics_csv(const dtr_experiment* e,
                                                    const char* path);
DTR_API dtr_status dtr_experiment_write_summary_json(const dtr_experiment* e,
                                                     const char* path);
/* NULL if the config did not request sigma_draws; caller frees. */
DTR_API dtr_status dtr_experiment_sigma(const dtr_experiment* e,
                                        dtr_matrix** out);
DTR_API dtr_status dtr_experiment_rho(const dtr_experiment* e, double* out);
DTR_API dtr_status dtr_experiment_threshold(const dtr_experiment* e,
                                            double* out);
DTR_API void dtr_experiment_free(dtr_experiment* e);

#ifdef __cplusplus
}
#endif

#endif /* DTR_H */
