#pragma once

#include <Eigen/Dense>

#include "dtr/errors.hpp"

namespace dtr {

// Fixed n x p design with its cached thin SVD X = P * diag(Lambda) * Q^T.
// P is n x p column-orthonormal, Q is p x p orthogonal, singular values are
// sorted descending and strictly positive. Immutable after construction;
// all downstream fits share one decomposition.
struct DesignMatrix {
  Eigen::MatrixXd X;
  Eigen::Index n = 0;
  Eigen::Index p = 0;
  Eigen::MatrixXd P;       // n x p
  Eigen::VectorXd Lambda;  // p, descending
  Eigen::MatrixXd Q;       // p x p

  double min_singular_value() const { return Lambda(p - 1); }
};

// Thin SVD with a deterministic sign convention: the first nonzero entry of
// each column of Q is positive (the matching column of P flips with it).
// Throws NonFinite on NaN/Inf input and RankDeficient when
// lambda_p / lambda_1 < 1e-12.
DesignMatrix decompose(const Eigen::MatrixXd& x);

}  // namespace dtr
