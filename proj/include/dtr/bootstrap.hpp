#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "dtr/estimator.hpp"
#include "dtr/rng.hpp"

namespace dtr {

// Covariance kernel for the dependent wild bootstrap multipliers: symmetric,
// K(0) = 1, nonnegative and nonincreasing on [0, inf). The gaussian kernel
// K(x) = exp(-x^2/2) satisfies the positive-Fourier-transform requirement;
// tabulated kernels are validated for the pointwise properties only and the
// PSD check happens when the multiplier covariance is factored.
class Kernel {
 public:
  static Kernel gaussian();
  // Piecewise-linear kernel through (x_k, value_k), x ascending from 0,
  // value_0 = 1, values nonincreasing and >= 0; zero beyond the last knot.
  static Kernel tabulated(std::vector<double> x, std::vector<double> value);

  double operator()(double x) const;
  const std::string& name() const { return name_; }

 private:
  Kernel() = default;
  std::string name_;
  std::vector<double> x_;
  std::vector<double> value_;
};

// Factor L with L L^T = Gamma, Gamma_ij = K((i-j)/k_n), from a symmetric
// eigendecomposition with eigenvalues floored at zero.
struct MultiplierFactor {
  double k_n = 0.0;
  Eigen::Index n = 0;
  Eigen::MatrixXd cov;     // Gamma
  Eigen::MatrixXd factor;  // L
  double min_eigenvalue = 0.0;  // smallest eigenvalue before flooring
};

// Throws NotPSD if an eigenvalue of Gamma is below -1e-6 * lambda_max, which
// signals a user-supplied kernel without a nonnegative Fourier transform.
MultiplierFactor multiplier_factor(const Kernel& kernel, double k_n,
                                   Eigen::Index n);

enum class BootstrapMethod { dependent_wild, efron, iid_wild };

std::string method_name(BootstrapMethod m);

struct BootstrapRun {
  BootstrapMethod method = BootstrapMethod::dependent_wild;
  std::int64_t replicates = 0;
  double alpha = 0.0;
  std::uint64_t seed = 0;
  Eigen::VectorXd deltas;  // delta*_b in replicate order, all >= 0
  double quantile = 0.0;   // sample 1-alpha quantile of deltas
};

struct ReplicateResult {
  Eigen::VectorXd gamma_star;
  Eigen::VectorXd tau_star;
  double delta = 0.0;
};

// One dependent-wild replicate: draws multipliers L*g, perturbs the fitted
// residuals, rebuilds y* = X beta_hat + eps*, and reruns the whole pipeline
// with the same (rho, b, M) and the shared SVD.
ReplicateResult dwb_replicate(const DesignMatrix& d, const RidgeFit& base,
                              const CombinationEstimate& base_est,
                              const MultiplierFactor& factor,
                              rng::Engine& eng);

// Full bootstrap: fits the base once, runs `replicates` independent
// replicates (replicate b draws from a stream derived from (seed, b), so the
// result is identical for any thread count), and applies the sample-quantile
// rule. kernel/k_n are only consulted for the dependent-wild method.
BootstrapRun run_bootstrap(BootstrapMethod method, const DesignMatrix& d,
                           const Eigen::VectorXd& y, const RidgeConfig& config,
                           const Eigen::MatrixXd& m, const Kernel& kernel,
                           double k_n, std::int64_t replicates, double alpha,
                           std::uint64_t seed, int threads = 1);

// The counting-rule sample quantile: sort ascending, return delta_{i*} with
// i* = min{ i : (1/n) #{ j : delta_j <= delta_i } >= 1 - alpha }.
double sample_quantile(const std::vector<double>& deltas, double alpha);
double sample_quantile(const Eigen::VectorXd& deltas, double alpha);

}  // namespace dtr
