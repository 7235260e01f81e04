#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "dtr/bootstrap.hpp"
#include "dtr/estimator.hpp"

namespace dtr {

// Simultaneous region { gamma : max_i |gamma_hat_i - gamma_i| / tau_hat_i
// <= radius } with its per-coordinate intervals.
struct ConfidenceRegion {
  Eigen::VectorXd gamma_hat;
  Eigen::VectorXd tau_hat;
  double radius = 0.0;
  double alpha = 0.0;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  bool contains(const Eigen::VectorXd& gamma) const;
};

struct TestResult {
  Eigen::VectorXd z;
  double statistic = 0.0;
  double radius = 0.0;
  bool reject = false;
};

// max_i |gamma_hat_i - z_i| / tau_hat_i; the single comparison both the
// region and the test are defined through, so their duality is exact.
double normalized_max_deviation(const Eigen::VectorXd& gamma_hat,
                                const Eigen::VectorXd& tau_hat,
                                const Eigen::VectorXd& z);

ConfidenceRegion confidence_region(const CombinationEstimate& est,
                                   const BootstrapRun& run);

TestResult hypothesis_test(const CombinationEstimate& est,
                           const BootstrapRun& run, const Eigen::VectorXd& z);

// Monte-Carlo oracle for the Gaussian approximation law: the distribution of
// max_i |sum_l v_il xi_l| with xi ~ N(0, Sigma). Sigma is only available in
// simulation (replaying the error process); this is a test fixture, not a
// user-facing estimator.
struct GaussianOracle {
  Eigen::MatrixXd sigma;    // n x n error covariance, symmetric PSD
  Eigen::MatrixXd weights;  // p1 x n rows v_i
  std::int64_t draws = 10000;
  std::uint64_t seed = 0;
};

// Builds the oracle weight rows v_il = (1/tau_i) sum_j c_ij w_j p_lj from a
// known support set (the population analogue of combine()).
GaussianOracle make_gaussian_oracle(const DesignMatrix& d,
                                    const Eigen::MatrixXd& m,
                                    const std::vector<Eigen::Index>& support,
                                    double rho, Eigen::MatrixXd sigma,
                                    std::int64_t draws, std::uint64_t seed);

// Draw-by-draw sample of the oracle max statistic (draw j uses the stream
// derived from (seed, j)).
Eigen::VectorXd oracle_max_sample(const GaussianOracle& oracle,
                                  int threads = 1);

// 1-alpha sample quantile of the oracle sample, same counting rule as the
// bootstrap. Requires draws >= 1000.
double gaussian_H_quantile(const GaussianOracle& oracle, double alpha,
                           int threads = 1);

}  // namespace dtr
