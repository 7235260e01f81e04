#include "dtr.h"

#include <cmath>
#include <cstring>
#include <string>

#include "dtr/csv.hpp"
#include "dtr/errors.hpp"
#include "dtr/inference.hpp"
#include "dtr/simulation.hpp"

namespace {

thread_local std::string g_last_error;

dtr_status status_from(dtr::ErrorCode code) {
  using dtr::ErrorCode;
  switch (code) {
    case ErrorCode::invalid_argument: return DTR_ERR_INVALID_ARGUMENT;
    case ErrorCode::non_finite: return DTR_ERR_NON_FINITE;
    case ErrorCode::rank_deficient: return DTR_ERR_RANK_DEFICIENT;
    case ErrorCode::dimension_mismatch: return DTR_ERR_DIMENSION_MISMATCH;
    case ErrorCode::not_psd: return DTR_ERR_NOT_PSD;
    case ErrorCode::empty_input: return DTR_ERR_EMPTY_INPUT;
    case ErrorCode::too_short: return DTR_ERR_TOO_SHORT;
    case ErrorCode::fold_rank_deficient: return DTR_ERR_FOLD_RANK_DEFICIENT;
    case ErrorCode::p_too_small: return DTR_ERR_P_TOO_SMALL;
    case ErrorCode::io_error: return DTR_ERR_IO;
  }
  return DTR_ERR_INTERNAL;
}

// Runs fn, translating exceptions into status codes + thread-local message.
template <typename Fn>
dtr_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return DTR_OK;
  } catch (const dtr::Error& e) {
    g_last_error = e.what();
    return status_from(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return DTR_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return DTR_ERR_INTERNAL;
  }
}

dtr_status fail_null(const char* what) {
  g_last_error = std::string(what) + " is NULL";
  return DTR_ERR_NULL_POINTER;
}

dtr::BootstrapMethod to_method(dtr_method m) {
  switch (m) {
    case DTR_METHOD_DEPENDENT_WILD: return dtr::BootstrapMethod::dependent_wild;
    case DTR_METHOD_EFRON: return dtr::BootstrapMethod::efron;
    case DTR_METHOD_IID_WILD: return dtr::BootstrapMethod::iid_wild;
  }
  dtr::throw_error(dtr::ErrorCode::invalid_argument, "unknown method");
}

dtr_status copy_vector(const Eigen::VectorXd& v, double* buffer) {
  if (!buffer) return fail_null("buffer");
  std::memcpy(buffer, v.data(),
              sizeof(double) * static_cast<std::size_t>(v.size()));
  return DTR_OK;
}

}  // namespace

struct dtr_matrix {
  Eigen::MatrixXd m;
};
struct dtr_design {
  dtr::DesignMatrix d;
};
struct dtr_fit {
  dtr::RidgeFit fit;
  const dtr_design* design;  // borrowed; must outlive the fit
};
struct dtr_combination {
  dtr::CombinationEstimate est;
};
struct dtr_bootstrap {
  dtr::BootstrapRun run;
};
struct dtr_tune_result {
  dtr::CvResult cv;
};
struct dtr_experiment {
  dtr::ExperimentResult result;
};

extern "C" {

const char* dtr_version(void) { return "0.1.0"; }

const char* dtr_status_name(dtr_status status) {
  switch (status) {
    case DTR_OK: return "ok";
    case DTR_ERR_NULL_POINTER: return "null_pointer";
    case DTR_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case DTR_ERR_NON_FINITE: return "non_finite";
    case DTR_ERR_RANK_DEFICIENT: return "rank_deficient";
    case DTR_ERR_DIMENSION_MISMATCH: return "dimension_mismatch";
    case DTR_ERR_NOT_PSD: return "not_psd";
    case DTR_ERR_EMPTY_INPUT: return "empty_input";
    case DTR_ERR_TOO_SHORT: return "too_short";
    case DTR_ERR_FOLD_RANK_DEFICIENT: return "fold_rank_deficient";
    case DTR_ERR_P_TOO_SMALL: return "p_too_small";
    case DTR_ERR_IO: return "io";
    case DTR_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* dtr_last_error(void) { return g_last_error.c_str(); }

/* ---- matrices ----------------------------------------------------------- */

dtr_status dtr_matrix_create(int64_t rows, int64_t cols, const double* data,
                             dtr_matrix** out) {
  if (!out) return fail_null("out");
  return guarded([&] {
    if (rows < 1 || cols < 1) {
      dtr::throw_error(dtr::ErrorCode::invalid_argument,
                       "matrix dimensions must be positive");
    }
    auto* m = new dtr_matrix;
    if (data) {
      m->m = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic,
                                            Eigen::Dynamic, Eigen::RowMajor>>(
          data, rows, cols);
    } else {
      m->m = Eigen::MatrixXd::Zero(rows, cols);
    }
    *out = m;
  });
}

dtr_status dtr_matrix_read_csv(const char* path, dtr_matrix** out) {
  if (!path) return fail_null("path");
  if (!out) return fail_null("out");
  return guarded([&] { *out = new dtr_matrix{dtr::read_matrix_csv(path)}; });
}

dtr_status dtr_matrix_write_csv(const dtr_matrix* m, const char* path) {
  if (!m) return fail_null("matrix");
  if (!path) return fail_null("path");
  return guarded([&] { dtr::write_matrix_csv(path, m->m); });
}

int64_t dtr_matrix_rows(const dtr_matrix* m) { return m ? m->m.rows() : 0; }
int64_t dtr_matrix_cols(const dtr_matrix* m) { return m ? m->m.cols() : 0; }

dtr_status dtr_matrix_copy_data(const dtr_matrix* m, double* buffer) {
  if (!m) return fail_null("matrix");
  if (!buffer) return fail_null("buffer");
  return guarded([&] {
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                             Eigen::RowMajor>>(buffer, m->m.rows(),
                                               m->m.cols()) = m->m;
  });
}

void dtr_matrix_free(dtr_matrix* m) { delete m; }

/* ---- design ------------------------------------------------------------- */

dtr_status dtr_design_create(const dtr_matrix* x, dtr_design** out) {
  if (!x) return fail_null("x");
  if (!out) return fail_null("out");
  return guarded([&] { *out = new dtr_design{dtr::decompose(x->m)}; });
}

int64_t dtr_design_n(const dtr_design* d) { return d ? d->d.n : 0; }
int64_t dtr_design_p(const dtr_design* d) { return d ? d->d.p : 0; }

dtr_status dtr_design_min_singular_value(const dtr_design* d, double* out) {
  if (!d) return fail_null("design");
  if (!out) return fail_null("out");
  *out = d->d.min_singular_value();
  return DTR_OK;
}

dtr_status dtr_design_singular_values(const dtr_design* d, double* buffer) {
  if (!d) return fail_null("design");
  if (!buffer) return fail_null("buffer");
  std::memcpy(buffer, d->d.Lambda.data(),
              sizeof(double) * static_cast<std::size_t>(d->d.p));
  return DTR_OK;
}

void dtr_design_free(dtr_design* d) { delete d; }

/* ---- fit ---------------------------------------------------------------- */

dtr_status dtr_fit_create(const dtr_design* d, const double* y, int64_t n,
                          double rho, double threshold, dtr_fit** out) {
  if (!d) return fail_null("design");
  if (!y) return fail_null("y");
  if (!out) return fail_null("out");
  return guarded([&] {
    if (n != d->d.n) {
      dtr::throw_error(dtr::ErrorCode::dimension_mismatch,
                       "y length does not match design");
    }
    const Eigen::Map<const Eigen::VectorXd> yv(y, n);
    auto* f = new dtr_fit{
        dtr::threshold_fit(d->d, yv, dtr::RidgeConfig{rho, threshold}), d};
    *out = f;
  });
}

dtr_status dtr_fit_beta_star(const dtr_fit* f, double* buffer) {
  if (!f) return fail_null("fit");
  return copy_vector(f->fit.beta_star, buffer);
}
dtr_status dtr_fit_beta_tilde(const dtr_fit* f, double* buffer) {
  if (!f) return fail_null("fit");
  return copy_vector(f->fit.beta_tilde, buffer);
}
dtr_status dtr_fit_beta_hat(const dtr_fit* f, double* buffer) {
  if (!f) return fail_null("fit");
  return copy_vector(f->fit.beta_hat, buffer);
}
dtr_status dtr_fit_residuals(const dtr_fit* f, double* buffer) {
  if (!f) return fail_null("fit");
  return copy_vector(f->fit.residuals, buffer);
}

int64_t dtr_fit_selected_count(const dtr_fit* f) {
  return f ? static_cast<int64_t>(f->fit.selected.size()) : 0;
}

dtr_status dtr_fit_selected(const dtr_fit* f, int64_t* buffer) {
  if (!f) return fail_null("fit");
  if (!buffer) return fail_null("buffer");
  for (std::size_t i = 0; i < f->fit.selected.size(); ++i) {
    buffer[i] = static_cast<int64_t>(f->fit.selected[i]);
  }
  return DTR_OK;
}

void dtr_fit_free(dtr_fit* f) { delete f; }

/* ---- combination -------------------------------------------------------- */

dtr_status dtr_combination_create(const dtr_fit* f, const dtr_matrix* m,
                                  dtr_combination** out) {
  if (!f) return fail_null("fit");
  if (!m) return fail_null("m");
  if (!out) return fail_null("out");
  return guarded([&] {
    *out = new dtr_combination{dtr::combine(f->fit, f->design->d, m->m)};
  });
}

int64_t dtr_combination_p1(const dtr_combination* c) {
  return c ? c->est.gamma_hat.size() : 0;
}

dtr_status dtr_combination_gamma_hat(const dtr_combination* c,
                                     double* buffer) {
  if (!c) return fail_null("combination");
  return copy_vector(c->est.gamma_hat, buffer);
}
dtr_status dtr_combination_tau_hat(const dtr_combination* c, double* buffer) {
  if (!c) return fail_null("combination");
  return copy_vector(c->est.tau_hat, buffer);
}
dtr_status dtr_combination_empty_selection(const dtr_combination* c,
                                           int* out) {
  if (!c) return fail_null("combination");
  if (!out) return fail_null("out");
  *out = c->est.empty_selection ? 1 : 0;
  return DTR_OK;
}

void dtr_combination_free(dtr_combination* c) { delete c; }

/* ---- bootstrap ----------------------------------------------------------- */

dtr_status dtr_bootstrap_run(const dtr_design* d, const double* y, int64_t n,
                             double rho, double threshold, const dtr_matrix* m,
                             dtr_method method, double k_n, int64_t replicates,
                             double alpha, uint64_t seed, int threads,
                             dtr_bootstrap** out) {
  if (!d) return fail_null("design");
  if (!y) return fail_null("y");
  if (!m) return fail_null("m");
  if (!out) return fail_null("out");
  return guarded([&] {
    if (n != d->d.n) {
      dtr::throw_error(dtr::ErrorCode::dimension_mismatch,
                       "y length does not match design");
    }
    const Eigen::Map<const Eigen::VectorXd> yv(y, n);
    *out = new dtr_bootstrap{dtr::run_bootstrap(
        to_method(method), d->d, yv, dtr::RidgeConfig{rho, threshold}, m->m,
        dtr::Kernel::gaussian(), k_n, replicates, alpha, seed, threads)};
  });
}

int64_t dtr_bootstrap_replicates(const dtr_bootstrap* b) {
  return b ? b->run.replicates : 0;
}

dtr_status dtr_bootstrap_quantile(const dtr_bootstrap* b, double* out) {
  if (!b) return fail_null("bootstrap");
  if (!out) return fail_null("out");
  *out = b->run.quantile;
  return DTR_OK;
}

dtr_status dtr_bootstrap_deltas(const dtr_bootstrap* b, double* buffer) {
  if (!b) return fail_null("bootstrap");
  return copy_vector(b->run.deltas, buffer);
}

void dtr_bootstrap_free(dtr_bootstrap* b) { delete b; }

dtr_status dtr_confidence_intervals(const dtr_combination* c,
                                    const dtr_bootstrap* b, double* lower,
                                    double* upper) {
  if (!c) return fail_null("combination");
  if (!b) return fail_null("bootstrap");
  if (!lower) return fail_null("lower");
  if (!upper) return fail_null("upper");
  return guarded([&] {
    const dtr::ConfidenceRegion region =
        dtr::confidence_region(c->est, b->run);
    std::memcpy(lower, region.lower.data(),
                sizeof(double) * static_cast<std::size_t>(region.lower.size()));
    std::memcpy(upper, region.upper.data(),
                sizeof(double) * static_cast<std::size_t>(region.upper.size()));
  });
}

dtr_status dtr_hypothesis_test(const dtr_combination* c, const dtr_bootstrap* b,
                               const double* z, int64_t p1, double* statistic,
                               int* reject) {
  if (!c) return fail_null("combination");
  if (!b) return fail_null("bootstrap");
  if (!z) return fail_null("z");
  if (!statistic) return fail_null("statistic");
  if (!reject) return fail_null("reject");
  return guarded([&] {
    const Eigen::Map<const Eigen::VectorXd> zv(z, p1);
    const dtr::TestResult t = dtr::hypothesis_test(c->est, b->run, zv);
    *statistic = t.statistic;
    *reject = t.reject ? 1 : 0;
  });
}

/* ---- tuning -------------------------------------------------------------- */

dtr_status dtr_cv_select(const dtr_matrix* x, const double* y, int64_t n,
                         const double* rhos, int64_t n_rhos,
                         const double* thresholds, int64_t n_thresholds,
                         int folds, int contiguous_folds, uint64_t seed,
                         int threads, dtr_tune_result** out) {
  if (!x) return fail_null("x");
  if (!y) return fail_null("y");
  if (!out) return fail_null("out");
  return guarded([&] {
    if (n != x->m.rows()) {
      dtr::throw_error(dtr::ErrorCode::dimension_mismatch,
                       "y length does not match X");
    }
    const Eigen::Map<const Eigen::VectorXd> yv(y, n);
    dtr::TuneGrid grid;
    grid.folds = folds;
    grid.contiguous = contiguous_folds != 0;
    if (n_rhos > 0 || n_thresholds > 0) {
      if (rhos) grid.rhos.assign(rhos, rhos + n_rhos);
      if (thresholds) {
        grid.thresholds.assign(thresholds, thresholds + n_thresholds);
      }
    }
    if (grid.rhos.empty() || grid.thresholds.empty()) {
      const dtr::TuneGrid defaults =
          dtr::default_tune_grid(dtr::decompose(x->m), yv);
      if (grid.rhos.empty()) grid.rhos = defaults.rhos;
      if (grid.thresholds.empty()) grid.thresholds = defaults.thresholds;
    }
    *out = new dtr_tune_result{dtr::cv_select(x->m, yv, grid, seed, threads)};
  });
}

dtr_status dtr_tune_rho(const dtr_tune_result* t, double* out) {
  if (!t) return fail_null("tune_result");
  if (!out) return fail_null("out");
  *out = t->cv.rho;
  return DTR_OK;
}
dtr_status dtr_tune_threshold(const dtr_tune_result* t, double* out) {
  if (!t) return fail_null("tune_result");
  if (!out) return fail_null("out");
  *out = t->cv.threshold;
  return DTR_OK;
}
dtr_status dtr_tune_score(const dtr_tune_result* t, double* out) {
  if (!t) return fail_null("tune_result");
  if (!out) return fail_null("out");
  *out = t->cv.score;
  return DTR_OK;
}

int64_t dtr_tune_table_size(const dtr_tune_result* t) {
  return t ? static_cast<int64_t>(t->cv.table.size()) : 0;
}

dtr_status dtr_tune_table(const dtr_tune_result* t, double* buffer) {
  if (!t) return fail_null("tune_result");
  if (!buffer) return fail_null("buffer");
  for (std::size_t i = 0; i < t->cv.table.size(); ++i) {
    const dtr::CvCell& cell = t->cv.table[i];
    buffer[4 * i + 0] = cell.rho;
    buffer[4 * i + 1] = cell.threshold;
    buffer[4 * i + 2] = static_cast<double>(cell.fold);
    buffer[4 * i + 3] = cell.score;
  }
  return DTR_OK;
}

void dtr_tune_result_free(dtr_tune_result* t) { delete t; }

dtr_status dtr_select_bandwidth(const double* residuals, int64_t n,
                                double* k_n, int64_t* m_hat, int* degenerate) {
  if (!residuals) return fail_null("residuals");
  if (!k_n) return fail_null("k_n");
  return guarded([&] {
    const Eigen::Map<const Eigen::VectorXd> r(residuals, n);
    const dtr::BandwidthResult result = dtr::select_bandwidth(r);
    *k_n = result.k_n;
    if (m_hat) *m_hat = static_cast<int64_t>(result.m_hat);
    if (degenerate) *degenerate = result.degenerate ? 1 : 0;
  });
}

/* ---- experiments ---------------------------------------------------------- */

void dtr_experiment_config_init(dtr_experiment_config* cfg) {
  if (!cfg) return;
  cfg->n = 200;
  cfg->p = 50;
  cfg->p1 = 5;
  cfg->z_decay = 2.5;
  cfg->seed = 1;
  cfg->n_sims = 1;
  cfg->replicates = 1000;
  cfg->alpha = 0.1;
  cfg->methods = 1u << DTR_METHOD_DEPENDENT_WILD;
  cfg->scale_factor = 1.0;
  cfg->rho = std::nan("");
  cfg->threshold = std::nan("");
  cfg->k_n = 0.0;
  cfg->threads = 0;
  cfg->sigma_draws = 0;
}

dtr_status dtr_experiment_run(const dtr_experiment_config* cfg,
                              dtr_experiment** out) {
  if (!cfg) return fail_null("config");
  if (!out) return fail_null("out");
  return guarded([&] {
    dtr::ExperimentConfig c;
    c.n = cfg->n;
    c.p = cfg->p;
    c.p1 = cfg->p1;
    c.z_decay = cfg->z_decay;
    c.seed = cfg->seed;
    c.n_sims = cfg->n_sims;
    c.replicates = cfg->replicates;
    c.alpha = cfg->alpha;
    c.methods.clear();
    const dtr_method all[] = {DTR_METHOD_DEPENDENT_WILD, DTR_METHOD_EFRON,
                              DTR_METHOD_IID_WILD};
    for (dtr_method m : all) {
      if (cfg->methods & (1u << m)) c.methods.push_back(to_method(m));
    }
    c.scale_factor = cfg->scale_factor;
    c.rho = cfg->rho;
    c.threshold = cfg->threshold;
    c.k_n = cfg->k_n;
    c.threads = cfg->threads;
    c.sigma_draws = cfg->sigma_draws;
    *out = new dtr_experiment{dtr::run_experiment(c)};
  });
}

dtr_status dtr_experiment_write_metrics_csv(const dtr_experiment* e,
                                            const char* path) {
  if (!e) return fail_null("experiment");
  if (!path) return fail_null("path");
  return guarded([&] { dtr::write_metrics_csv(e->result, path); });
}

dtr_status dtr_experiment_write_summary_json(const dtr_experiment* e,
                                             const char* path) {
  if (!e) return fail_null("experiment");
  if (!path) return fail_null("path");
  return guarded([&] { dtr::write_summary_json(e->result, path); });
}

dtr_status dtr_experiment_sigma(const dtr_experiment* e, dtr_matrix** out) {
  if (!e) return fail_null("experiment");
  if (!out) return fail_null("out");
  if (e->result.sigma.size() == 0) {
    *out = nullptr;
    return DTR_OK;
  }
  return guarded([&] { *out = new dtr_matrix{e->result.sigma}; });
}

dtr_status dtr_experiment_rho(const dtr_experiment* e, double* out) {
  if (!e) return fail_null("experiment");
  if (!out) return fail_null("out");
  *out = e->result.rho;
  return DTR_OK;
}

dtr_status dtr_experiment_threshold(const dtr_experiment* e, double* out) {
  if (!e) return fail_null("experiment");
  if (!out) return fail_null("out");
  *out = e->result.threshold;
  return DTR_OK;
}

void dtr_experiment_free(dtr_experiment* e) { delete e; }

}  // extern "C"
