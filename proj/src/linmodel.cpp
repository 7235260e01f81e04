#include "dtr/linmodel.hpp"

#include <Eigen/SVD>

namespace dtr {

DesignMatrix decompose(const Eigen::MatrixXd& x) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  if (n < 1 || p < 1) {
    throw_error(ErrorCode::invalid_argument, "design matrix must be non-empty");
  }
  if (p > n) {
    throw_error(ErrorCode::invalid_argument,
                "design matrix needs p <= n, got n=" + std::to_string(n) +
                    " p=" + std::to_string(p));
  }
  if (!x.allFinite()) {
    throw_error(ErrorCode::non_finite, "design matrix has NaN/Inf entries");
  }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);

  DesignMatrix d;
  d.X = x;
  d.n = n;
  d.p = p;
  d.P = svd.matrixU();
  d.Lambda = svd.singularValues();  // Eigen returns them descending
  d.Q = svd.matrixV();

  if (d.Lambda(p - 1) <= 0.0 || d.Lambda(p - 1) / d.Lambda(0) < 1e-12) {
    throw_error(ErrorCode::rank_deficient,
                "design matrix is rank deficient: lambda_p/lambda_1 = " +
                    std::to_string(d.Lambda(p - 1) / d.Lambda(0)));
  }

  // Sign convention: first nonzero entry of each Q column positive. Flipping
  // the paired P column keeps X = P Lambda Q^T; every downstream formula is
  // invariant to the choice, this just makes results byte-reproducible.
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index i = 0; i < p; ++i) {
      const double q = d.Q(i, j);
      if (q != 0.0) {
        if (q < 0.0) {
          d.Q.col(j) = -d.Q.col(j);
          d.P.col(j) = -d.P.col(j);
        }
        break;
      }
    }
  }
  return d;
}

}  // namespace dtr
