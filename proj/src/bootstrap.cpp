#include "dtr/bootstrap.hpp"

#include <algorithm>
#include <cmath>

#include "dtr/parallel.hpp"

namespace dtr {

Kernel Kernel::gaussian() {
  Kernel k;
  k.name_ = "gaussian";
  return k;
}

Kernel Kernel::tabulated(std::vector<double> x, std::vector<double> value) {
  if (x.empty() || x.size() != value.size()) {
    throw_error(ErrorCode::invalid_argument,
                "tabulated kernel needs matching non-empty knot vectors");
  }
  if (x.front() != 0.0 || value.front() != 1.0) {
    throw_error(ErrorCode::invalid_argument,
                "tabulated kernel must start at K(0) = 1");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(value[i]) || value[i] < 0.0) {
      throw_error(ErrorCode::invalid_argument,
                  "tabulated kernel knots must be finite and nonnegative");
    }
    if (i > 0 && (x[i] <= x[i - 1] || value[i] > value[i - 1])) {
      throw_error(ErrorCode::invalid_argument,
                  "tabulated kernel must have ascending x and nonincreasing "
                  "values");
    }
  }
  Kernel k;
  k.name_ = "tabulated";
  k.x_ = std::move(x);
  k.value_ = std::move(value);
  return k;
}

double Kernel::operator()(double x) const {
  const double a = std::abs(x);
  if (x_.empty()) {
    return std::exp(-0.5 * a * a);  // gaussian
  }
  if (a >= x_.back()) return 0.0;
  const auto it = std::upper_bound(x_.begin(), x_.end(), a);
  const std::size_t hi = static_cast<std::size_t>(it - x_.begin());
  if (hi == 0) return value_.front();
  const double t = (a - x_[hi - 1]) / (x_[hi] - x_[hi - 1]);
  return value_[hi - 1] + t * (value_[hi] - value_[hi - 1]);
}

MultiplierFactor multiplier_factor(const Kernel& kernel, double k_n,
                                   Eigen::Index n) {
  if (!(k_n > 0.0) || !std::isfinite(k_n)) {
    throw_error(ErrorCode::invalid_argument, "bandwidth k_n must be > 0");
  }
  if (n < 1) {
    throw_error(ErrorCode::invalid_argument, "multiplier length must be >= 1");
  }

  MultiplierFactor f;
  f.k_n = k_n;
  f.n = n;

  // Toeplitz fill from one kernel evaluation per offset.
  Eigen::VectorXd by_offset(n);
  for (Eigen::Index d = 0; d < n; ++d) {
    by_offset(d) = kernel(static_cast<double>(d) / k_n);
  }
  f.cov.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      f.cov(i, j) = by_offset(std::abs(i - j));
    }
  }

  // Exactly diagonal covariance (k_n so small every off-diagonal underflows
  // to 0) factors as itself; this keeps the k_n -> 0 limit identical to
  // i.i.d. multipliers instead of depending on eigenvector conventions.
  bool diagonal = true;
  for (Eigen::Index d = 1; d < n && diagonal; ++d) {
    diagonal = by_offset(d) == 0.0;
  }
  if (diagonal) {
    f.factor = Eigen::MatrixXd::Identity(n, n);  // K(0) = 1 by contract
    f.min_eigenvalue = 1.0;
    return f;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(f.cov);
  if (eig.info() != Eigen::Success) {
    throw_error(ErrorCode::not_psd, "eigendecomposition of Gamma failed");
  }
  const Eigen::VectorXd& ev = eig.eigenvalues();
  f.min_eigenvalue = ev(0);
  const double ev_max = ev(n - 1);
  if (f.min_eigenvalue < -1e-6 * ev_max) {
    throw_error(ErrorCode::not_psd,
                "kernel covariance is not PSD: min eigenvalue " +
                    std::to_string(f.min_eigenvalue));
  }
  f.factor = eig.eigenvectors() *
             ev.cwiseMax(0.0).cwiseSqrt().asDiagonal();
  return f;
}

std::string method_name(BootstrapMethod m) {
  switch (m) {
    case BootstrapMethod::dependent_wild: return "dwb";
    case BootstrapMethod::efron: return "efron";
    case BootstrapMethod::iid_wild: return "wild";
  }
  return "unknown";
}

namespace {

// Refit on y* and evaluate the normalized max deviation from the base
// estimate. Shared by every bootstrap method.
ReplicateResult replicate_from_errors(const DesignMatrix& d,
                                      const RidgeFit& base,
                                      const CombinationEstimate& base_est,
                                      const Eigen::VectorXd& x_beta_hat,
                                      const Eigen::VectorXd& eps_star) {
  const Eigen::VectorXd y_star = x_beta_hat + eps_star;
  const RidgeFit fit_star = threshold_fit(d, y_star, base.config);
  const CombinationEstimate est_star = combine(fit_star, d, base_est.M);

  ReplicateResult r;
  r.gamma_star = est_star.gamma_hat;
  r.tau_star = est_star.tau_hat;
  r.delta = 0.0;
  for (Eigen::Index i = 0; i < r.gamma_star.size(); ++i) {
    const double dev =
        std::abs(r.gamma_star(i) - base_est.gamma_hat(i)) / r.tau_star(i);
    r.delta = std::max(r.delta, dev);
  }
  return r;
}

Eigen::VectorXd draw_normals(Eigen::Index n, rng::Engine& eng) {
  rng::Normal normal;
  Eigen::VectorXd g(n);
  for (Eigen::Index i = 0; i < n; ++i) g(i) = normal(eng);
  return g;
}

}  // namespace

ReplicateResult dwb_replicate(const DesignMatrix& d, const RidgeFit& base,
                              const CombinationEstimate& base_est,
                              const MultiplierFactor& factor,
                              rng::Engine& eng) {
  if (factor.n != d.n) {
    throw_error(ErrorCode::dimension_mismatch,
                "multiplier factor length does not match design");
  }
  const Eigen::VectorXd g = draw_normals(d.n, eng);
  const Eigen::VectorXd multipliers = factor.factor * g;
  const Eigen::VectorXd eps_star =
      base.residuals.cwiseProduct(multipliers);
  return replicate_from_errors(d, base, base_est, d.X * base.beta_hat,
                               eps_star);
}

BootstrapRun run_bootstrap(BootstrapMethod method, const DesignMatrix& d,
                           const Eigen::VectorXd& y, const RidgeConfig& config,
                           const Eigen::MatrixXd& m, const Kernel& kernel,
                           double k_n, std::int64_t replicates, double alpha,
                           std::uint64_t seed, int threads) {
  if (replicates < 1) {
    throw_error(ErrorCode::invalid_argument, "need at least one replicate");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw_error(ErrorCode::invalid_argument, "alpha must be in (0, 1)");
  }

  const RidgeFit base = threshold_fit(d, y, config);
  const CombinationEstimate base_est = combine(base, d, m);
  const Eigen::VectorXd x_beta_hat = d.X * base.beta_hat;

  MultiplierFactor factor;
  if (method == BootstrapMethod::dependent_wild) {
    factor = multiplier_factor(kernel, k_n, d.n);
  }

  Eigen::VectorXd centered;
  if (method == BootstrapMethod::efron) {
    centered = (base.residuals.array() - base.residuals.mean()).matrix();
  }

  BootstrapRun run;
  run.method = method;
  run.replicates = replicates;
  run.alpha = alpha;
  run.seed = seed;
  run.deltas.resize(replicates);

  parallel_for(replicates, threads, [&](std::int64_t b) {
    rng::Engine eng = rng::make_engine(
        rng::stream_seed(seed, rng::tag::replicate, static_cast<std::uint64_t>(b)));
    Eigen::VectorXd eps_star(d.n);
    switch (method) {
      case BootstrapMethod::dependent_wild: {
        const Eigen::VectorXd g = draw_normals(d.n, eng);
        eps_star = base.residuals.cwiseProduct(factor.factor * g);
        break;
      }
      case BootstrapMethod::efron: {
        for (Eigen::Index i = 0; i < d.n; ++i) {
          eps_star(i) = centered(static_cast<Eigen::Index>(
              rng::bounded(eng, static_cast<std::uint64_t>(d.n))));
        }
        break;
      }
      case BootstrapMethod::iid_wild: {
        const Eigen::VectorXd g = draw_normals(d.n, eng);
        eps_star = base.residuals.cwiseProduct(g);
        break;
      }
    }
    run.deltas(b) =
        replicate_from_errors(d, base, base_est, x_beta_hat, eps_star).delta;
  });

  run.quantile = sample_quantile(run.deltas, alpha);
  return run;
}

double sample_quantile(const std::vector<double>& deltas, double alpha) {
  if (deltas.empty()) {
    throw_error(ErrorCode::empty_input, "sample_quantile on empty input");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw_error(ErrorCode::invalid_argument, "alpha must be in (0, 1)");
  }
  std::vector<double> sorted = deltas;
  for (double v : sorted) {
    if (!std::isfinite(v)) {
      throw_error(ErrorCode::non_finite, "sample_quantile on non-finite input");
    }
  }
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto count = static_cast<double>(
        std::upper_bound(sorted.begin(), sorted.end(), sorted[i]) -
        sorted.begin());
    if (count / static_cast<double>(n) >= 1.0 - alpha) {
      return sorted[i];
    }
  }
  return sorted.back();
}

double sample_quantile(const Eigen::VectorXd& deltas, double alpha) {
  return sample_quantile(
      std::vector<double>(deltas.data(), deltas.data() + deltas.size()), alpha);
}

}  // namespace dtr
