#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "dtr/linmodel.hpp"

namespace dtr {

// Candidate grid for the (rho, threshold) cross-validation. Folds are
// contiguous row blocks by default: the errors are serially dependent and
// random folds would leak dependence between train and validation. A seeded
// random-fold mode is kept for comparison.
struct TuneGrid {
  std::vector<double> rhos;        // positive, ascending
  std::vector<double> thresholds;  // nonnegative, ascending
  int folds = 10;
  bool contiguous = true;

  void validate(Eigen::Index n) const;
};

// rho log-spaced over [1e-2, 1e3] (25 points); thresholds linear over
// [0, 1.5 * max|beta_tilde_i|] at the smallest rho (30 points).
TuneGrid default_tune_grid(const DesignMatrix& d, const Eigen::VectorXd& y);

struct CvCell {
  double rho = 0.0;
  double threshold = 0.0;
  int fold = 0;
  double score = 0.0;  // ||y_valid - X_valid beta_hat||_2 on this fold
};

struct CvResult {
  double rho = 0.0;
  double threshold = 0.0;
  double score = 0.0;          // summed validation score of the winner
  std::vector<CvCell> table;   // every (rho, threshold, fold) evaluation
};

// Exhaustive grid search; winner is the exact arg-min of the summed score,
// ties broken toward larger rho then larger threshold. Throws
// FoldRankDeficient when a training block has fewer than p rows.
CvResult cv_select(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                   const TuneGrid& grid, std::uint64_t seed, int threads = 1);

struct BandwidthResult {
  double k_n = 1.0;
  Eigen::Index m_hat = 0;      // estimated significant-lag cutoff
  std::vector<double> acf;     // autocorrelations at lags 1..max_lag
  bool degenerate = false;     // zero-variance residuals
};

// Flat-top autocorrelation cutoff rule on the fitted residuals: m_hat is the
// smallest lag after which K_T consecutive autocorrelations stay below
// 2*sqrt(log10(n)/n), with K_T = max(5, ceil(sqrt(log10 n))) and lags
// searched up to ceil(sqrt(n)); k_n = clamp(2*m_hat + 1, 1, ceil(n/2)).
BandwidthResult select_bandwidth(const Eigen::VectorXd& residuals);

}  // namespace dtr
