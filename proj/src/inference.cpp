#include "dtr/inference.hpp"

#include <cmath>

#include "dtr/parallel.hpp"

namespace dtr {

double normalized_max_deviation(const Eigen::VectorXd& gamma_hat,
                                const Eigen::VectorXd& tau_hat,
                                const Eigen::VectorXd& z) {
  if (z.size() != gamma_hat.size()) {
    throw_error(ErrorCode::dimension_mismatch,
                "z has length " + std::to_string(z.size()) + ", expected " +
                    std::to_string(gamma_hat.size()));
  }
  double stat = 0.0;
  for (Eigen::Index i = 0; i < gamma_hat.size(); ++i) {
    stat = std::max(stat, std::abs(gamma_hat(i) - z(i)) / tau_hat(i));
  }
  return stat;
}

bool ConfidenceRegion::contains(const Eigen::VectorXd& gamma) const {
  return normalized_max_deviation(gamma_hat, tau_hat, gamma) <= radius;
}

ConfidenceRegion confidence_region(const CombinationEstimate& est,
                                   const BootstrapRun& run) {
  if (!std::isfinite(run.quantile)) {
    throw_error(ErrorCode::non_finite, "bootstrap quantile is not finite");
  }
  ConfidenceRegion region;
  region.gamma_hat = est.gamma_hat;
  region.tau_hat = est.tau_hat;
  region.radius = run.quantile;
  region.alpha = run.alpha;
  region.lower = est.gamma_hat - run.quantile * est.tau_hat;
  region.upper = est.gamma_hat + run.quantile * est.tau_hat;
  return region;
}

TestResult hypothesis_test(const CombinationEstimate& est,
                           const BootstrapRun& run, const Eigen::VectorXd& z) {
  TestResult t;
  t.z = z;
  t.statistic = normalized_max_deviation(est.gamma_hat, est.tau_hat, z);
  t.radius = run.quantile;
  t.reject = t.statistic > t.radius;
  return t;
}

GaussianOracle make_gaussian_oracle(const DesignMatrix& d,
                                    const Eigen::MatrixXd& m,
                                    const std::vector<Eigen::Index>& support,
                                    double rho, Eigen::MatrixXd sigma,
                                    std::int64_t draws, std::uint64_t seed) {
  if (m.cols() != d.p) {
    throw_error(ErrorCode::dimension_mismatch, "M has wrong column count");
  }
  if (m.rows() < 1) {
    throw_error(ErrorCode::invalid_argument, "M must have at least one row");
  }
  if (sigma.rows() != d.n || sigma.cols() != d.n) {
    throw_error(ErrorCode::dimension_mismatch, "Sigma must be n x n");
  }

  const Eigen::Index p1 = m.rows();
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(p1, d.p);
  for (Eigen::Index k : support) {
    if (k < 0 || k >= d.p) {
      throw_error(ErrorCode::invalid_argument, "support index out of range");
    }
    c += m.col(k) * d.Q.row(k);
  }

  const Eigen::VectorXd w = debias_weights(d.Lambda, rho);
  Eigen::VectorXd tau(p1);
  for (Eigen::Index i = 0; i < p1; ++i) {
    const double s =
        (c.row(i).transpose().array().square() * w.array().square()).sum();
    tau(i) = std::sqrt(1.0 / static_cast<double>(d.n) + s);
  }

  // v = diag(1/tau) * (c .* w^T) * P^T
  Eigen::MatrixXd cw = c.array().rowwise() * w.transpose().array();
  GaussianOracle oracle;
  oracle.weights = tau.cwiseInverse().asDiagonal() * (cw * d.P.transpose());
  oracle.sigma = std::move(sigma);
  oracle.draws = draws;
  oracle.seed = seed;
  return oracle;
}

namespace {

// PSD factor of Sigma shared by the oracle sample.
Eigen::MatrixXd sigma_factor(const Eigen::MatrixXd& sigma) {
  const double scale = sigma.cwiseAbs().maxCoeff();
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() >
      1e-8 * std::max(scale, 1.0)) {
    throw_error(ErrorCode::invalid_argument, "Sigma is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma);
  if (eig.info() != Eigen::Success) {
    throw_error(ErrorCode::not_psd, "eigendecomposition of Sigma failed");
  }
  const Eigen::VectorXd& ev = eig.eigenvalues();
  if (ev(0) < -1e-6 * std::max(ev(ev.size() - 1), 0.0)) {
    throw_error(ErrorCode::not_psd, "Sigma has eigenvalue " +
                                        std::to_string(ev(0)) +
                                        " below the PSD tolerance");
  }
  return eig.eigenvectors() * ev.cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

}  // namespace

Eigen::VectorXd oracle_max_sample(const GaussianOracle& oracle, int threads) {
  if (oracle.draws < 1) {
    throw_error(ErrorCode::invalid_argument, "oracle needs at least one draw");
  }
  if (oracle.weights.cols() != oracle.sigma.rows()) {
    throw_error(ErrorCode::dimension_mismatch,
                "oracle weights and Sigma disagree on n");
  }
  // max_i |v_i . (L g)| = max_i |(v L g)_i|
  const Eigen::MatrixXd a = oracle.weights * sigma_factor(oracle.sigma);
  const Eigen::Index n = a.cols();

  Eigen::VectorXd sample(oracle.draws);
  parallel_for(oracle.draws, threads, [&](std::int64_t j) {
    rng::Engine eng = rng::make_engine(rng::stream_seed(
        oracle.seed, rng::tag::oracle, static_cast<std::uint64_t>(j)));
    rng::Normal normal;
    Eigen::VectorXd g(n);
    for (Eigen::Index l = 0; l < n; ++l) g(l) = normal(eng);
    sample(j) = (a * g).cwiseAbs().maxCoeff();
  });
  return sample;
}

double gaussian_H_quantile(const GaussianOracle& oracle, double alpha,
                           int threads) {
  if (oracle.draws < 1000) {
    throw_error(ErrorCode::invalid_argument,
                "oracle quantile needs >= 1000 draws");
  }
  return sample_quantile(oracle_max_sample(oracle, threads), alpha);
}

}  // namespace dtr
