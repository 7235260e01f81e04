#pragma once

#include <Eigen/Dense>
#include <vector>

#include "dtr/linmodel.hpp"

namespace dtr {

struct RidgeConfig {
  double rho = 0.0;        // ridge penalty, >= 0
  double threshold = 0.0;  // hard-threshold level, >= 0

  void validate() const;
};

// Output of the ridge -> debias -> hard-threshold pipeline for one (rho, b).
struct RidgeFit {
  RidgeConfig config;
  Eigen::VectorXd beta_star;           // classical ridge estimate
  Eigen::VectorXd beta_tilde;          // debiased estimate
  std::vector<Eigen::Index> selected;  // { i : |beta_tilde_i| > b }, ascending
  Eigen::VectorXd beta_hat;            // beta_tilde on selected, 0 elsewhere
  Eigen::VectorXd residuals;           // y - X * beta_hat
};

// Linear-combination estimate gamma_hat = M * beta_hat with its selection
// coefficients and normalizers. tau_hat_i >= 1/sqrt(n) always; when nothing
// was selected the estimate degenerates to 0 with tau_hat = 1/sqrt(n) and
// empty_selection is set.
struct CombinationEstimate {
  Eigen::MatrixXd M;          // p1 x p
  Eigen::VectorXd gamma_hat;  // p1
  Eigen::MatrixXd c_hat;      // p1 x p, c_ij = sum_{k in selected} m_ik q_kj
  Eigen::VectorXd tau_hat;    // p1
  bool empty_selection = false;
};

// Per-coordinate shrinkage weights w_j = lambda_j/(lambda_j^2 + rho)
//                                      + rho*lambda_j/(lambda_j^2 + rho)^2.
// These map P^T y into debiased-estimate coordinates and weight both the
// normalizers tau_hat and the Gaussian-approximation oracle.
Eigen::VectorXd debias_weights(const Eigen::VectorXd& singular_values,
                               double rho);

// Classical ridge estimate (X^T X + rho I)^{-1} X^T y, computed in SVD
// coordinates; rho = 0 gives OLS.
Eigen::VectorXd ridge_star(const DesignMatrix& d, const Eigen::VectorXd& y,
                           double rho);

// Adds the estimated ridge bias back:
// beta_tilde = beta_star + rho Q (Lambda^2 + rho I)^{-1} Q^T beta_star.
Eigen::VectorXd debias(const DesignMatrix& d, const Eigen::VectorXd& beta_star,
                       double rho);

// Full pipeline: ridge_star -> debias -> strict threshold |.| > b -> zero-out
// -> residuals.
RidgeFit threshold_fit(const DesignMatrix& d, const Eigen::VectorXd& y,
                       const RidgeConfig& config);

CombinationEstimate combine(const RidgeFit& fit, const DesignMatrix& d,
                            const Eigen::MatrixXd& m);

}  // namespace dtr
