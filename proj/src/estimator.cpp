#include "dtr/estimator.hpp"

#include <cmath>

namespace dtr {

void RidgeConfig::validate() const {
  if (!std::isfinite(rho) || rho < 0.0) {
    throw_error(ErrorCode::invalid_argument, "rho must be finite and >= 0");
  }
  if (!std::isfinite(threshold) || threshold < 0.0) {
    throw_error(ErrorCode::invalid_argument,
                "threshold must be finite and >= 0");
  }
}

Eigen::VectorXd debias_weights(const Eigen::VectorXd& singular_values,
                               double rho) {
  const auto& lam = singular_values.array();
  const auto denom = lam.square() + rho;
  return (lam / denom + rho * lam / denom.square()).matrix();
}

static void check_observation(const DesignMatrix& d, const Eigen::VectorXd& y) {
  if (y.size() != d.n) {
    throw_error(ErrorCode::dimension_mismatch,
                "y has length " + std::to_string(y.size()) + ", design has n=" +
                    std::to_string(d.n));
  }
  if (!y.allFinite()) {
    throw_error(ErrorCode::non_finite, "y has NaN/Inf entries");
  }
}

Eigen::VectorXd ridge_star(const DesignMatrix& d, const Eigen::VectorXd& y,
                           double rho) {
  check_observation(d, y);
  const Eigen::VectorXd u = d.P.transpose() * y;
  const auto& lam = d.Lambda.array();
  const Eigen::VectorXd scaled =
      (lam / (lam.square() + rho) * u.array()).matrix();
  return d.Q * scaled;
}

Eigen::VectorXd debias(const DesignMatrix& d, const Eigen::VectorXd& beta_star,
                       double rho) {
  if (beta_star.size() != d.p) {
    throw_error(ErrorCode::dimension_mismatch, "beta_star has wrong length");
  }
  const Eigen::VectorXd coords = d.Q.transpose() * beta_star;
  const auto& lam = d.Lambda.array();
  const Eigen::VectorXd correction =
      (rho / (lam.square() + rho) * coords.array()).matrix();
  return beta_star + d.Q * correction;
}

RidgeFit threshold_fit(const DesignMatrix& d, const Eigen::VectorXd& y,
                       const RidgeConfig& config) {
  config.validate();
  RidgeFit fit;
  fit.config = config;
  fit.beta_star = ridge_star(d, y, config.rho);
  fit.beta_tilde = debias(d, fit.beta_star, config.rho);
  fit.beta_hat = Eigen::VectorXd::Zero(d.p);
  for (Eigen::Index i = 0; i < d.p; ++i) {
    if (std::abs(fit.beta_tilde(i)) > config.threshold) {
      fit.selected.push_back(i);
      fit.beta_hat(i) = fit.beta_tilde(i);
    }
  }
  fit.residuals = y - d.X * fit.beta_hat;
  return fit;
}

CombinationEstimate combine(const RidgeFit& fit, const DesignMatrix& d,
                            const Eigen::MatrixXd& m) {
  if (m.cols() != d.p) {
    throw_error(ErrorCode::dimension_mismatch,
                "M has " + std::to_string(m.cols()) + " columns, expected p=" +
                    std::to_string(d.p));
  }
  if (m.rows() < 1) {
    throw_error(ErrorCode::invalid_argument, "M must have at least one row");
  }

  const Eigen::Index p1 = m.rows();
  CombinationEstimate est;
  est.M = m;
  est.gamma_hat = m * fit.beta_hat;
  est.c_hat = Eigen::MatrixXd::Zero(p1, d.p);
  est.empty_selection = fit.selected.empty();

  const double floor_term = 1.0 / static_cast<double>(d.n);
  if (est.empty_selection) {
    est.tau_hat = Eigen::VectorXd::Constant(p1, std::sqrt(floor_term));
    return est;
  }

  const Eigen::Index k = static_cast<Eigen::Index>(fit.selected.size());
  Eigen::MatrixXd m_sel(p1, k);
  Eigen::MatrixXd q_sel(k, d.p);
  for (Eigen::Index j = 0; j < k; ++j) {
    m_sel.col(j) = m.col(fit.selected[static_cast<std::size_t>(j)]);
    q_sel.row(j) = d.Q.row(fit.selected[static_cast<std::size_t>(j)]);
  }
  est.c_hat = m_sel * q_sel;

  const Eigen::VectorXd w = debias_weights(d.Lambda, fit.config.rho);
  est.tau_hat.resize(p1);
  for (Eigen::Index i = 0; i < p1; ++i) {
    const double s =
        (est.c_hat.row(i).transpose().array().square() * w.array().square())
            .sum();
    est.tau_hat(i) = std::sqrt(floor_term + s);
  }
  return est;
}

}  // namespace dtr
