#ifndef REJECT_ACTIVE_H
#define REJECT_ACTIVE_H

/* C API of the reject_active library: budgeted active learning with
 * rejection-based uncertain regions, plus the passive baseline and the
 * benchmarking drivers (learning curves, convergence-rate fit).
 *
 * All functions return RAL_OK (0) on success or a nonzero error code;
 * ral_last_error() describes the most recent failure on the calling thread.
 * Objects are created through *_new / ral_dataset_* / ral_run_* factories
 * and released with the matching *_free.
 */

#ifdef __cplusplus
extern "C" {
#endif

enum {
  RAL_OK = 0,
  RAL_ERR_CONFIG = 1,  /* invalid parameters */
  RAL_ERR_INPUT = 2,   /* malformed runtime input */
  RAL_ERR_LOAD = 3,    /* unreadable or invalid data file */
  RAL_ERR_RUNTIME = 4, /* starvation/exhaustion or internal failure */
  RAL_ERR_IO = 5       /* output file could not be written */
};

typedef struct ral_config ral_config;
typedef struct ral_dataset ral_dataset;
typedef struct ral_result ral_result;
typedef struct ral_curve ral_curve;
typedef struct ral_rate ral_rate;

const char* ral_version(void);
/* Message for the last failure on this thread; empty string if none. */
const char* ral_last_error(void);

/* ------------------------------------------------------------------ */
/* configuration                                                       */

ral_config* ral_config_new(void);
void ral_config_free(ral_config* cfg);

int ral_config_set_budget(ral_config* cfg, long long budget);
/* "practical" or "theoretical" */
int ral_config_set_mode(ral_config* cfg, const char* mode);
/* "histogram", "knn" or "linear" */
int ral_config_set_learner(ral_config* cfg, const char* learner);
int ral_config_set_knn_k(ral_config* cfg, int k);
/* 0 keeps the schedule width N_k^(-1/(d+2)) */
int ral_config_set_hist_r(ral_config* cfg, double r);
int ral_config_set_cn(ral_config* cfg, double c_n);
int ral_config_set_ceps(ral_config* cfg, double c_eps);
int ral_config_set_delta(ral_config* cfg, double delta);
/* 0 picks the mode default: 2 in practical mode, 1 in theoretical mode */
int ral_config_set_n0_mult(ral_config* cfg, int multiplier);
int ral_config_set_mk(ral_config* cfg, int m_k);
int ral_config_set_u(ral_config* cfg, double u);
int ral_config_set_recycle(ral_config* cfg, int labeled, int unlabeled);
int ral_config_set_seed(ral_config* cfg, unsigned long long seed);
/* < 1: held-out fraction of a pool; >= 1: point count; 0: defaults */
int ral_config_set_test_size(ral_config* cfg, double test_size);

/* ------------------------------------------------------------------ */
/* datasets                                                            */

/* name: sine | dasgupta1 | easyhard2 | gauss3. dim applies to sine (1 or 2),
 * sigma to gauss3 (pass 0 for the default 0.3). omega/phi shape the sine
 * wave eta(t) = (1+sin(omega*t+phi))/2; pass omega = 0 for the default
 * pi/2 wave. pool_size > 0 materializes a finite pool from the generator;
 * 0 samples the distribution directly. */
int ral_dataset_synthetic(const char* name, int dim, double sigma, double omega, double phi,
                          long long pool_size, ral_dataset** out);
/* label_col: 0-based index or column name; empty/NULL means last column. */
int ral_dataset_csv(const char* path, const char* label_col, int normalize, ral_dataset** out);
void ral_dataset_free(ral_dataset* dataset);

int ral_dataset_dim(const ral_dataset* dataset);
/* pool size; 0 for distribution-backed datasets */
long long ral_dataset_size(const ral_dataset* dataset);
/* materialize n labeled points and write them as CSV (synthetic only) */
int ral_dataset_write_csv(const ral_dataset* dataset, long long n, unsigned long long seed,
                          const char* path);

/* ------------------------------------------------------------------ */
/* runs                                                                */

typedef struct ral_step_info {
  int k;
  long long n_k;
  double eps;
  double eps_hat;
  double lambda;   /* valid only when has_lambda != 0 */
  int has_lambda;
  long long labels_requested;
  long long budget_used;
} ral_step_info;

int ral_run_active(const ral_config* cfg, const ral_dataset* dataset, ral_result** out);
int ral_run_passive(const ral_config* cfg, const ral_dataset* dataset, ral_result** out);
void ral_result_free(ral_result* result);

long long ral_result_budget_used(const ral_result* result);
/* 1 when the run aborted (starvation/exhaustion) and is partial */
int ral_result_incomplete(const ral_result* result);
const char* ral_result_abort_reason(const ral_result* result);
int ral_result_num_steps(const ral_result* result);
int ral_result_step(const ral_result* result, int index, ral_step_info* out);
int ral_result_metrics(const ral_result* result, double* precision, double* excess_risk,
                       int* has_excess);
int ral_result_num_stages(const ral_result* result);
/* piecewise prediction with the fitted model */
int ral_result_predict(const ral_result* result, const double* x, int d, double* eta, int* label,
                       int* stage);
int ral_result_write_json(const ral_result* result, const char* path);
/* per-step trace: k,N_k,eps_k,eps_hat_k,lambda_k,labels_requested,budget_used */
int ral_result_write_csv(const ral_result* result, const char* path);

/* ------------------------------------------------------------------ */
/* benchmarking                                                        */

typedef struct ral_curve_point {
  long long budget;
  int is_active;
  int repeats;
  double precision_mean;
  double precision_std;
  double excess_mean; /* valid only when has_excess != 0 */
  double excess_std;
  int has_excess;
  int aborts;
} ral_curve_point;

int ral_curve_run(const ral_config* cfg, const ral_dataset* dataset, const long long* budgets,
                  int n_budgets, int repeats, ral_curve** out);
void ral_curve_free(ral_curve* curve);
int ral_curve_num_points(const ral_curve* curve);
int ral_curve_point_at(const ral_curve* curve, int index, ral_curve_point* out);
int ral_curve_write_csv(const ral_curve* curve, const char* path);
int ral_curve_write_json(const ral_curve* curve, const char* path);

int ral_rate_check(const ral_config* cfg, const ral_dataset* dataset, const long long* budgets,
                   int n_budgets, int repeats, ral_rate** out);
void ral_rate_free(ral_rate* rate);
int ral_rate_stats(const ral_rate* rate, double* slope, double* intercept, double* r_squared);
int ral_rate_write_json(const ral_rate* rate, const char* path);

#ifdef __cplusplus
}
#endif

#endif /* REJECT_ACTIVE_H */
