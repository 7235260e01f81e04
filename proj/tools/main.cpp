// dtr command line tool: fit, infer, tune, bandwidth, simulate.
//
// This is a plain client of the shared library's C API (dtr.h); all numerics
// live behind it. Exit codes: 0 success, 2 usage/input error, 3 numerical
// failure.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dtr.h"
#include "dtr/jsonio.hpp"
#include "json.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct CliError {
  int exit_code;
  std::string message;
};

int exit_code_for(dtr_status status) {
  switch (status) {
    case DTR_ERR_NOT_PSD:
    case DTR_ERR_RANK_DEFICIENT:
      return kExitNumerical;
    default:
      return kExitUsage;
  }
}

void check(dtr_status status, const std::string& context) {
  if (status == DTR_OK) return;
  throw CliError{exit_code_for(status),
                 context + ": " + dtr_status_name(status) + " (" +
                     dtr_last_error() + ")"};
}

using MatrixPtr = std::unique_ptr<dtr_matrix, decltype(&dtr_matrix_free)>;
using DesignPtr = std::unique_ptr<dtr_design, decltype(&dtr_design_free)>;
using FitPtr = std::unique_ptr<dtr_fit, decltype(&dtr_fit_free)>;
using CombPtr =
    std::unique_ptr<dtr_combination, decltype(&dtr_combination_free)>;
using BootPtr = std::unique_ptr<dtr_bootstrap, decltype(&dtr_bootstrap_free)>;
using TunePtr =
    std::unique_ptr<dtr_tune_result, decltype(&dtr_tune_result_free)>;
using ExpPtr = std::unique_ptr<dtr_experiment, decltype(&dtr_experiment_free)>;

MatrixPtr read_matrix(const std::string& path) {
  dtr_matrix* m = nullptr;
  check(dtr_matrix_read_csv(path.c_str(), &m), "reading " + path);
  return MatrixPtr(m, &dtr_matrix_free);
}

// Accepts an n x 1 column or 1 x n row.
std::vector<double> read_vector(const std::string& path) {
  MatrixPtr m = read_matrix(path);
  const int64_t rows = dtr_matrix_rows(m.get());
  const int64_t cols = dtr_matrix_cols(m.get());
  if (rows != 1 && cols != 1) {
    throw CliError{kExitUsage, path + " is " + std::to_string(rows) + "x" +
                                   std::to_string(cols) +
                                   ", expected a vector"};
  }
  std::vector<double> v(static_cast<std::size_t>(rows * cols));
  check(dtr_matrix_copy_data(m.get(), v.data()), "reading " + path);
  return v;
}

DesignPtr make_design(const dtr_matrix* x) {
  dtr_design* d = nullptr;
  check(dtr_design_create(x, &d), "decomposing design matrix");
  return DesignPtr(d, &dtr_design_free);
}

void write_array(dtr::jsonio::Writer& w, const std::vector<double>& v) {
  w.begin_array();
  for (double x : v) w.value(x);
  w.end_array();
}

void write_manifest(
    const std::string& output_path, const std::string& command,
    const std::vector<std::string>& inputs,
    const std::vector<std::pair<std::string, std::string>>& params,
    double wall_time_s) {
  const std::string path = output_path + ".manifest.json";
  std::ofstream out(path);
  if (!out) throw CliError{kExitUsage, "cannot write " + path};
  dtr::jsonio::Writer w(out);
  w.begin_object();
  w.kv("command", command);
  w.key("inputs").begin_array();
  for (const auto& in : inputs) w.value(in);
  w.end_array();
  w.key("parameters").begin_object();
  for (const auto& [k, v] : params) w.kv(k, v);
  w.end_object();
  w.kv("tool_version", dtr_version());
  w.kv("wall_time_s", wall_time_s);
  w.end_object();
  w.finish();
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();
};

dtr_method parse_method(const std::string& name) {
  if (name == "dwb") return DTR_METHOD_DEPENDENT_WILD;
  if (name == "efron") return DTR_METHOD_EFRON;
  if (name == "wild") return DTR_METHOD_IID_WILD;
  throw CliError{kExitUsage, "unknown method '" + name +
                                 "' (expected dwb, efron or wild)"};
}

/* ---- fit ----------------------------------------------------------------- */

struct FitArgs {
  std::string x_path, y_path, m_path, out = "fit.json";
  double rho = 0.0, threshold = 0.0;
};

int run_fit(const FitArgs& args) {
  Stopwatch timer;
  MatrixPtr x = read_matrix(args.x_path);
  std::vector<double> y = read_vector(args.y_path);
  if (dtr_matrix_rows(x.get()) != static_cast<int64_t>(y.size())) {
    throw CliError{kExitUsage,
                   args.y_path + " has " + std::to_string(y.size()) +
                       " rows, " + args.x_path + " has " +
                       std::to_string(dtr_matrix_rows(x.get()))};
  }
  DesignPtr design = make_design(x.get());
  const int64_t n = dtr_design_n(design.get());
  const int64_t p = dtr_design_p(design.get());

  dtr_fit* fit_raw = nullptr;
  check(dtr_fit_create(design.get(), y.data(), n, args.rho, args.threshold,
                       &fit_raw),
        "fitting");
  FitPtr fit(fit_raw, &dtr_fit_free);

  std::vector<double> beta_star(static_cast<std::size_t>(p));
  std::vector<double> beta_tilde(static_cast<std::size_t>(p));
  std::vector<double> beta_hat(static_cast<std::size_t>(p));
  std::vector<double> residuals(static_cast<std::size_t>(n));
  check(dtr_fit_beta_star(fit.get(), beta_star.data()), "fit output");
  check(dtr_fit_beta_tilde(fit.get(), beta_tilde.data()), "fit output");
  check(dtr_fit_beta_hat(fit.get(), beta_hat.data()), "fit output");
  check(dtr_fit_residuals(fit.get(), residuals.data()), "fit output");
  std::vector<int64_t> selected(
      static_cast<std::size_t>(dtr_fit_selected_count(fit.get())));
  if (!selected.empty()) {
    check(dtr_fit_selected(fit.get(), selected.data()), "fit output");
  }

  double res_norm = 0.0, res_min = 0.0, res_max = 0.0, res_mean = 0.0;
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    const double r = residuals[i];
    res_norm += r * r;
    res_mean += r;
    if (i == 0 || r < res_min) res_min = r;
    if (i == 0 || r > res_max) res_max = r;
  }
  res_norm = std::sqrt(res_norm);
  res_mean /= static_cast<double>(residuals.size());

  std::ofstream out(args.out);
  if (!out) throw CliError{kExitUsage, "cannot write " + args.out};
  dtr::jsonio::Writer w(out);
  w.begin_object();
  w.kv("n", n);
  w.kv("p", p);
  w.kv("rho", args.rho);
  w.kv("threshold", args.threshold);
  w.key("beta_star");
  write_array(w, beta_star);
  w.key("beta_tilde");
  write_array(w, beta_tilde);
  w.key("beta_hat");
  write_array(w, beta_hat);
  w.key("selected").begin_array();
  for (int64_t i : selected) w.value(i);
  w.end_array();
  w.key("residual_summary").begin_object();
  w.kv("norm", res_norm);
  w.kv("min", res_min);
  w.kv("max", res_max);
  w.kv("mean", res_mean);
  w.end_object();

  if (!args.m_path.empty()) {
    MatrixPtr m = read_matrix(args.m_path);
    dtr_combination* comb_raw = nullptr;
    check(dtr_combination_create(fit.get(), m.get(), &comb_raw), "combining");
    CombPtr comb(comb_raw, &dtr_combination_free);
    const int64_t p1 = dtr_combination_p1(comb.get());
    std::vector<double> gamma(static_cast<std::size_t>(p1));
    std::vector<double> tau(static_cast<std::size_t>(p1));
    int empty = 0;
    check(dtr_combination_gamma_hat(comb.get(), gamma.data()), "combining");
    check(dtr_combination_tau_hat(comb.get(), tau.data()), "combining");
    check(dtr_combination_empty_selection(comb.get(), &empty), "combining");
    w.key("gamma_hat");
    write_array(w, gamma);
    w.key("tau_hat");
    write_array(w, tau);
    w.kv("empty_selection", empty != 0);
  }
  w.end_object();
  w.finish();
  out.close();

  std::vector<std::string> inputs = {args.x_path, args.y_path};
  if (!args.m_path.empty()) inputs.push_back(args.m_path);
  write_manifest(args.out, "fit", inputs,
                 {{"rho", std::to_string(args.rho)},
                  {"threshold", std::to_string(args.threshold)}},
                 timer.seconds());
  return 0;
}

/* ---- infer --------------------------------------------------------------- */

struct InferArgs {
  std::string x_path, y_path, m_path, z_path, out = "infer.json";
  std::string kernel = "gaussian";
  std::string method = "dwb";
  double rho = 0.0, threshold = 0.0, k_n = 0.0, alpha = 0.1;
  std::int64_t replicates = 1000;
  std::uint64_t seed = 1;
  int threads = 0;
  bool emit_deltas = false;
};

int run_infer(const InferArgs& args) {
  Stopwatch timer;
  if (args.kernel != "gaussian") {
    throw CliError{kExitUsage, "only the gaussian kernel is supported"};
  }
  const dtr_method method = parse_method(args.method);

  MatrixPtr x = read_matrix(args.x_path);
  std::vector<double> y = read_vector(args.y_path);
  MatrixPtr m = read_matrix(args.m_path);
  DesignPtr design = make_design(x.get());
  const int64_t n = dtr_design_n(design.get());
  if (static_cast<int64_t>(y.size()) != n) {
    throw CliError{kExitUsage,
                   args.y_path + " length does not match " + args.x_path};
  }

  dtr_fit* fit_raw = nullptr;
  check(dtr_fit_create(design.get(), y.data(), n, args.rho, args.threshold,
                       &fit_raw),
        "fitting");
  FitPtr fit(fit_raw, &dtr_fit_free);
  dtr_combination* comb_raw = nullptr;
  check(dtr_combination_create(fit.get(), m.get(), &comb_raw), "combining");
  CombPtr comb(comb_raw, &dtr_combination_free);
  const int64_t p1 = dtr_combination_p1(comb.get());

  dtr_bootstrap* boot_raw = nullptr;
  check(dtr_bootstrap_run(design.get(), y.data(), n, args.rho, args.threshold,
                          m.get(), method, args.k_n, args.replicates,
                          args.alpha, args.seed, args.threads, &boot_raw),
        "bootstrap");
  BootPtr boot(boot_raw, &dtr_bootstrap_free);

  double quantile = 0.0;
  check(dtr_bootstrap_quantile(boot.get(), &quantile), "bootstrap output");
  std::vector<double> gamma(static_cast<std::size_t>(p1));
  std::vector<double> tau(static_cast<std::size_t>(p1));
  std::vector<double> lower(static_cast<std::size_t>(p1));
  std::vector<double> upper(static_cast<std::size_t>(p1));
  check(dtr_combination_gamma_hat(comb.get(), gamma.data()), "output");
  check(dtr_combination_tau_hat(comb.get(), tau.data()), "output");
  check(dtr_confidence_intervals(comb.get(), boot.get(), lower.data(),
                                 upper.data()),
        "intervals");

  std::ofstream out(args.out);
  if (!out) throw CliError{kExitUsage, "cannot write " + args.out};
  dtr::jsonio::Writer w(out);
  w.begin_object();
  w.kv("method", args.method);
  w.kv("kernel", args.kernel);
  w.kv("k_n", args.k_n);
  w.kv("replicates", args.replicates);
  w.kv("alpha", args.alpha);
  w.kv("seed", args.seed);
  w.kv("quantile", quantile);
  w.key("gamma_hat");
  write_array(w, gamma);
  w.key("tau_hat");
  write_array(w, tau);
  w.key("intervals").begin_object();
  w.key("lower");
  write_array(w, lower);
  w.key("upper");
  write_array(w, upper);
  w.end_object();

  if (args.emit_deltas) {
    std::vector<double> deltas(
        static_cast<std::size_t>(dtr_bootstrap_replicates(boot.get())));
    check(dtr_bootstrap_deltas(boot.get(), deltas.data()), "deltas");
    w.key("deltas");
    write_array(w, deltas);
  }

  if (!args.z_path.empty()) {
    std::vector<double> z = read_vector(args.z_path);
    if (static_cast<int64_t>(z.size()) != p1) {
      throw CliError{kExitUsage, args.z_path + " has length " +
                                     std::to_string(z.size()) +
                                     ", expected " + std::to_string(p1)};
    }
    double statistic = 0.0;
    int reject = 0;
    check(dtr_hypothesis_test(comb.get(), boot.get(), z.data(), p1, &statistic,
                              &reject),
          "hypothesis test");
    w.key("test").begin_object();
    w.key("z");
    write_array(w, z);
    w.kv("statistic", statistic);
    w.kv("reject", reject != 0);
    w.end_object();
  }
  w.end_object();
  w.finish();
  out.close();

  std::vector<std::string> inputs = {args.x_path, args.y_path, args.m_path};
  if (!args.z_path.empty()) inputs.push_back(args.z_path);
  write_manifest(args.out, "infer", inputs,
                 {{"rho", std::to_string(args.rho)},
                  {"threshold", std::to_string(args.threshold)},
                  {"kernel", args.kernel},
                  {"k_n", std::to_string(args.k_n)},
                  {"B", std::to_string(args.replicates)},
                  {"alpha", std::to_string(args.alpha)},
                  {"method", args.method},
                  {"seed", std::to_string(args.seed)}},
                 timer.seconds());
  return 0;
}

/* ---- tune / bandwidth ----------------------------------------------------- */

struct TuneArgs {
  std::string x_path, y_path, out = "tune.json", cv_table = "cv_table.csv";
  std::vector<double> rhos;
  std::vector<double> thresholds;
  int folds = 10;
  bool random_folds = false;
  std::uint64_t seed = 1;
  int threads = 0;
};

int run_tune(const TuneArgs& args) {
  Stopwatch timer;
  MatrixPtr x = read_matrix(args.x_path);
  std::vector<double> y = read_vector(args.y_path);

  dtr_tune_result* tune_raw = nullptr;
  check(dtr_cv_select(x.get(), y.data(), static_cast<int64_t>(y.size()),
                      args.rhos.empty() ? nullptr : args.rhos.data(),
                      static_cast<int64_t>(args.rhos.size()),
                      args.thresholds.empty() ? nullptr
                                              : args.thresholds.data(),
                      static_cast<int64_t>(args.thresholds.size()), args.folds,
                      args.random_folds ? 0 : 1, args.seed, args.threads,
                      &tune_raw),
        "cross-validation");
  TunePtr tune(tune_raw, &dtr_tune_result_free);

  double rho = 0.0, threshold = 0.0, score = 0.0;
  check(dtr_tune_rho(tune.get(), &rho), "tune output");
  check(dtr_tune_threshold(tune.get(), &threshold), "tune output");
  check(dtr_tune_score(tune.get(), &score), "tune output");

  {
    std::ofstream out(args.out);
    if (!out) throw CliError{kExitUsage, "cannot write " + args.out};
    dtr::jsonio::Writer w(out);
    w.begin_object();
    w.kv("rho", rho);
    w.kv("threshold", threshold);
    w.kv("score", score);
    w.kv("folds", args.folds);
    w.kv("contiguous_folds", !args.random_folds);
    w.kv("seed", args.seed);
    w.end_object();
    w.finish();
  }

  const int64_t cells = dtr_tune_table_size(tune.get());
  std::vector<double> table(static_cast<std::size_t>(cells) * 4);
  check(dtr_tune_table(tune.get(), table.data()), "tune table");
  {
    std::ofstream out(args.cv_table);
    if (!out) throw CliError{kExitUsage, "cannot write " + args.cv_table};
    out << "rho,b,fold,score\n";
    char buf[96];
    for (int64_t i = 0; i < cells; ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%d,%.17g\n",
                    table[4 * i + 0], table[4 * i + 1],
                    static_cast<int>(table[4 * i + 2]), table[4 * i + 3]);
      out << buf;
    }
  }

  write_manifest(args.out, "tune", {args.x_path, args.y_path},
                 {{"folds", std::to_string(args.folds)},
                  {"random_folds", args.random_folds ? "true" : "false"},
                  {"seed", std::to_string(args.seed)}},
                 timer.seconds());
  return 0;
}

struct BandwidthArgs {
  std::string residuals_path, out = "bandwidth.json";
};

int run_bandwidth(const BandwidthArgs& args) {
  Stopwatch timer;
  std::vector<double> residuals = read_vector(args.residuals_path);
  double k_n = 0.0;
  int64_t m_hat = 0;
  int degenerate = 0;
  check(dtr_select_bandwidth(residuals.data(),
                             static_cast<int64_t>(residuals.size()), &k_n,
                             &m_hat, &degenerate),
        "bandwidth selection");

  std::ofstream out(args.out);
  if (!out) throw CliError{kExitUsage, "cannot write " + args.out};
  dtr::jsonio::Writer w(out);
  w.begin_object();
  w.kv("k_n", k_n);
  w.kv("m_hat", m_hat);
  w.kv("degenerate", degenerate != 0);
  w.end_object();
  w.finish();
  out.close();

  write_manifest(args.out, "bandwidth", {args.residuals_path}, {},
                 timer.seconds());
  return 0;
}

/* ---- simulate ------------------------------------------------------------- */

struct SimulateArgs {
  std::string config_path, out_dir = ".";
  double scale_factor = 0.0;  // 0 = take from config
  int threads = -1;           // -1 = take from config
};

int run_simulate(const SimulateArgs& args) {
  Stopwatch timer;
  nlohmann::json config;
  {
    std::ifstream in(args.config_path);
    if (!in) throw CliError{kExitUsage, "cannot open " + args.config_path};
    try {
      in >> config;
    } catch (const nlohmann::json::exception& e) {
      throw CliError{kExitUsage,
                     args.config_path + ": JSON parse error: " + e.what()};
    }
  }

  dtr_experiment_config cfg;
  dtr_experiment_config_init(&cfg);
  try {
    cfg.n = config.at("n").get<int64_t>();
    cfg.p = config.at("p").get<int64_t>();
    cfg.p1 = config.at("p1").get<int64_t>();
    cfg.seed = config.value("seed", std::uint64_t{1});
    cfg.z_decay = config.value("z_decay", 2.5);
    cfg.n_sims = config.value("n_sims", std::int64_t{1});
    cfg.replicates = config.value("replicates", std::int64_t{1000});
    cfg.alpha = config.value("alpha", 0.1);
    cfg.scale_factor = config.value("scale_factor", 1.0);
    if (config.contains("rho")) cfg.rho = config["rho"].get<double>();
    if (config.contains("threshold")) {
      cfg.threshold = config["threshold"].get<double>();
    }
    if (config.contains("k_n")) cfg.k_n = config["k_n"].get<double>();
    cfg.sigma_draws = config.value("sigma_draws", std::int64_t{0});
    if (config.contains("threads")) cfg.threads = config["threads"].get<int>();
    if (config.contains("methods")) {
      cfg.methods = 0;
      for (const auto& name : config["methods"]) {
        cfg.methods |= 1u << parse_method(name.get<std::string>());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw CliError{kExitUsage, args.config_path + ": bad config: " + e.what()};
  }
  if (args.scale_factor > 0.0) cfg.scale_factor = args.scale_factor;
  if (args.threads >= 0) cfg.threads = args.threads;

  dtr_experiment* exp_raw = nullptr;
  check(dtr_experiment_run(&cfg, &exp_raw), "experiment");
  ExpPtr experiment(exp_raw, &dtr_experiment_free);

  const std::string metrics_path = args.out_dir + "/metrics.csv";
  const std::string summary_path = args.out_dir + "/summary.json";
  check(dtr_experiment_write_metrics_csv(experiment.get(),
                                         metrics_path.c_str()),
        "writing " + metrics_path);
  check(dtr_experiment_write_summary_json(experiment.get(),
                                          summary_path.c_str()),
        "writing " + summary_path);

  if (cfg.sigma_draws > 0) {
    dtr_matrix* sigma_raw = nullptr;
    check(dtr_experiment_sigma(experiment.get(), &sigma_raw), "sigma");
    MatrixPtr sigma(sigma_raw, &dtr_matrix_free);
    const std::string sigma_path = args.out_dir + "/sigma.csv";
    check(dtr_matrix_write_csv(sigma.get(), sigma_path.c_str()),
          "writing " + sigma_path);
  }

  write_manifest(metrics_path, "simulate", {args.config_path},
                 {{"scale_factor", std::to_string(cfg.scale_factor)},
                  {"seed", std::to_string(cfg.seed)}},
                 timer.seconds());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "debiased and threshold ridge regression with dependent wild "
      "bootstrap inference"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(dtr_version()));

  FitArgs fit_args;
  auto* fit = app.add_subcommand("fit", "ridge -> debias -> threshold fit");
  fit->add_option("X", fit_args.x_path, "design matrix CSV")->required();
  fit->add_option("y", fit_args.y_path, "response vector CSV")->required();
  fit->add_option("--rho", fit_args.rho, "ridge penalty")->required();
  fit->add_option("--threshold", fit_args.threshold, "hard threshold")
      ->required();
  fit->add_option("--M", fit_args.m_path, "combination matrix CSV");
  fit->add_option("--out", fit_args.out, "output JSON path");

  InferArgs infer_args;
  auto* infer = app.add_subcommand(
      "infer", "bootstrap confidence intervals and hypothesis tests");
  infer->add_option("X", infer_args.x_path, "design matrix CSV")->required();
  infer->add_option("y", infer_args.y_path, "response vector CSV")->required();
  infer->add_option("M", infer_args.m_path, "combination matrix CSV")
      ->required();
  infer->add_option("--rho", infer_args.rho, "ridge penalty")->required();
  infer->add_option("--threshold", infer_args.threshold, "hard threshold")
      ->required();
  infer->add_option("--kernel", infer_args.kernel, "kernel (gaussian)");
  infer->add_option("--k-n", infer_args.k_n, "multiplier bandwidth")
      ->required();
  infer->add_option("--B", infer_args.replicates, "bootstrap replicates");
  infer->add_option("--alpha", infer_args.alpha, "1 - coverage");
  infer->add_option("--seed", infer_args.seed, "RNG seed");
  infer->add_option("--method", infer_args.method, "dwb | efron | wild");
  infer->add_option("--test", infer_args.z_path, "null vector z CSV");
  infer->add_flag("--deltas", infer_args.emit_deltas,
                  "include all replicate statistics");
  infer->add_option("--threads", infer_args.threads, "worker threads");
  infer->add_option("--out", infer_args.out, "output JSON path");

  TuneArgs tune_args;
  auto* tune = app.add_subcommand("tune", "cross-validate (rho, threshold)");
  tune->add_option("X", tune_args.x_path, "design matrix CSV")->required();
  tune->add_option("y", tune_args.y_path, "response vector CSV")->required();
  tune->add_option("--rhos", tune_args.rhos, "rho grid (default log-spaced)");
  tune->add_option("--thresholds", tune_args.thresholds,
                   "threshold grid (default data-driven)");
  tune->add_option("--folds", tune_args.folds, "fold count");
  tune->add_flag("--random-folds", tune_args.random_folds,
                 "shuffle rows into folds instead of contiguous blocks");
  tune->add_option("--seed", tune_args.seed, "RNG seed (random folds)");
  tune->add_option("--threads", tune_args.threads, "worker threads");
  tune->add_option("--out", tune_args.out, "output JSON path");
  tune->add_option("--cv-table", tune_args.cv_table, "per-cell score CSV");

  BandwidthArgs bw_args;
  auto* bw =
      app.add_subcommand("bandwidth", "flat-top bandwidth rule on residuals");
  bw->add_option("residuals", bw_args.residuals_path, "residuals CSV")
      ->required();
  bw->add_option("--out", bw_args.out, "output JSON path");

  SimulateArgs sim_args;
  auto* sim = app.add_subcommand("simulate", "Monte-Carlo experiment runner");
  sim->add_option("config", sim_args.config_path, "experiment config JSON")
      ->required();
  sim->add_option("--out-dir", sim_args.out_dir, "output directory");
  sim->add_option("--scale-factor", sim_args.scale_factor,
                  "override config scale factor");
  sim->add_option("--threads", sim_args.threads, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (fit->parsed()) return run_fit(fit_args);
    if (infer->parsed()) return run_infer(infer_args);
    if (tune->parsed()) return run_tune(tune_args);
    if (bw->parsed()) return run_bandwidth(bw_args);
    if (sim->parsed()) return run_simulate(sim_args);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
