#include "dtr/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dtr/estimator.hpp"
#include "dtr/parallel.hpp"
#include "dtr/rng.hpp"

namespace dtr {

void TuneGrid::validate(Eigen::Index n) const {
  if (rhos.empty() || thresholds.empty()) {
    throw_error(ErrorCode::invalid_argument, "tuning grids must be non-empty");
  }
  for (std::size_t i = 0; i < rhos.size(); ++i) {
    if (!std::isfinite(rhos[i]) || rhos[i] <= 0.0 ||
        (i > 0 && rhos[i] <= rhos[i - 1])) {
      throw_error(ErrorCode::invalid_argument,
                  "rho grid must be positive and strictly ascending");
    }
  }
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (!std::isfinite(thresholds[i]) || thresholds[i] < 0.0 ||
        (i > 0 && thresholds[i] < thresholds[i - 1])) {
      throw_error(ErrorCode::invalid_argument,
                  "threshold grid must be nonnegative and ascending");
    }
  }
  if (folds < 2) {
    throw_error(ErrorCode::invalid_argument, "need at least 2 folds");
  }
  if (static_cast<Eigen::Index>(folds) > n) {
    throw_error(ErrorCode::invalid_argument, "more folds than rows");
  }
}

TuneGrid default_tune_grid(const DesignMatrix& d, const Eigen::VectorXd& y) {
  TuneGrid grid;
  const int n_rho = 25;
  for (int i = 0; i < n_rho; ++i) {
    const double e = -2.0 + 5.0 * i / (n_rho - 1);  // 1e-2 .. 1e3
    grid.rhos.push_back(std::pow(10.0, e));
  }
  const Eigen::VectorXd beta_tilde =
      debias(d, ridge_star(d, y, grid.rhos.front()), grid.rhos.front());
  const double b_max = 1.5 * beta_tilde.cwiseAbs().maxCoeff();
  const int n_b = 30;
  for (int i = 0; i < n_b; ++i) {
    grid.thresholds.push_back(b_max * i / (n_b - 1));
  }
  return grid;
}

namespace {

struct Fold {
  std::vector<Eigen::Index> train;
  std::vector<Eigen::Index> valid;
};

std::vector<Fold> make_folds(Eigen::Index n, int folds, bool contiguous,
                             std::uint64_t seed) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  if (!contiguous) {
    rng::Engine eng = rng::make_engine(rng::stream_seed(seed, rng::tag::folds));
    for (Eigen::Index i = n - 1; i > 0; --i) {
      const auto j = static_cast<Eigen::Index>(
          rng::bounded(eng, static_cast<std::uint64_t>(i + 1)));
      std::swap(order[static_cast<std::size_t>(i)],
                order[static_cast<std::size_t>(j)]);
    }
  }
  std::vector<Fold> out(static_cast<std::size_t>(folds));
  for (int f = 0; f < folds; ++f) {
    const Eigen::Index begin = n * f / folds;
    const Eigen::Index end = n * (f + 1) / folds;
    auto& fold = out[static_cast<std::size_t>(f)];
    for (Eigen::Index i = 0; i < n; ++i) {
      (i >= begin && i < end ? fold.valid : fold.train).push_back(order[i]);
    }
    std::sort(fold.train.begin(), fold.train.end());
    std::sort(fold.valid.begin(), fold.valid.end());
  }
  return out;
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& x,
                          const std::vector<Eigen::Index>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = x.row(rows[i]);
  }
  return out;
}

Eigen::VectorXd take_rows(const Eigen::VectorXd& y,
                          const std::vector<Eigen::Index>& rows) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = y(rows[i]);
  }
  return out;
}

}  // namespace

CvResult cv_select(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                   const TuneGrid& grid, std::uint64_t seed, int threads) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  if (y.size() != n) {
    throw_error(ErrorCode::dimension_mismatch, "y length does not match X");
  }
  grid.validate(n);

  const auto folds = make_folds(n, grid.folds, grid.contiguous, seed);
  for (std::size_t f = 0; f < folds.size(); ++f) {
    if (static_cast<Eigen::Index>(folds[f].train.size()) < p) {
      throw_error(ErrorCode::fold_rank_deficient,
                  "fold " + std::to_string(f) + " training block has " +
                      std::to_string(folds[f].train.size()) +
                      " rows, fewer than p=" + std::to_string(p));
    }
  }

  struct FoldData {
    DesignMatrix design;
    Eigen::VectorXd y_train;
    Eigen::MatrixXd x_valid;
    Eigen::VectorXd y_valid;
  };
  std::vector<FoldData> fold_data(folds.size());
  parallel_for(static_cast<std::int64_t>(folds.size()), threads,
               [&](std::int64_t f) {
                 const auto& fold = folds[static_cast<std::size_t>(f)];
                 auto& fd = fold_data[static_cast<std::size_t>(f)];
                 fd.design = decompose(take_rows(x, fold.train));
                 fd.y_train = take_rows(y, fold.train);
                 fd.x_valid = take_rows(x, fold.valid);
                 fd.y_valid = take_rows(y, fold.valid);
               });

  // scores[(ri * n_b + bi) * folds + f]; beta_tilde is shared across the
  // threshold loop, which matches threshold_fit bit-for-bit because the
  // estimate does not depend on b.
  const std::size_t n_rho = grid.rhos.size();
  const std::size_t n_b = grid.thresholds.size();
  const std::size_t n_folds = folds.size();
  std::vector<double> scores(n_rho * n_b * n_folds, 0.0);

  parallel_for(static_cast<std::int64_t>(n_rho * n_folds), threads,
               [&](std::int64_t idx) {
                 const std::size_t ri = static_cast<std::size_t>(idx) / n_folds;
                 const std::size_t f = static_cast<std::size_t>(idx) % n_folds;
                 const auto& fd = fold_data[f];
                 const double rho = grid.rhos[ri];
                 const Eigen::VectorXd beta_tilde =
                     debias(fd.design, ridge_star(fd.design, fd.y_train, rho),
                            rho);
                 Eigen::VectorXd beta_hat(beta_tilde.size());
                 for (std::size_t bi = 0; bi < n_b; ++bi) {
                   const double b = grid.thresholds[bi];
                   for (Eigen::Index i = 0; i < beta_tilde.size(); ++i) {
                     beta_hat(i) =
                         std::abs(beta_tilde(i)) > b ? beta_tilde(i) : 0.0;
                   }
                   scores[(ri * n_b + bi) * n_folds + f] =
                       (fd.y_valid - fd.x_valid * beta_hat).norm();
                 }
               });

  CvResult result;
  result.table.reserve(n_rho * n_b * n_folds);
  bool have_best = false;
  for (std::size_t ri = 0; ri < n_rho; ++ri) {
    for (std::size_t bi = 0; bi < n_b; ++bi) {
      double total = 0.0;
      for (std::size_t f = 0; f < n_folds; ++f) {
        const double s = scores[(ri * n_b + bi) * n_folds + f];
        result.table.push_back(
            {grid.rhos[ri], grid.thresholds[bi], static_cast<int>(f), s});
        total += s;
      }
      const bool better =
          !have_best || total < result.score ||
          (total == result.score &&
           (grid.rhos[ri] > result.rho ||
            (grid.rhos[ri] == result.rho &&
             grid.thresholds[bi] > result.threshold)));
      if (better) {
        have_best = true;
        result.score = total;
        result.rho = grid.rhos[ri];
        result.threshold = grid.thresholds[bi];
      }
    }
  }
  return result;
}

BandwidthResult select_bandwidth(const Eigen::VectorXd& residuals) {
  const Eigen::Index n = residuals.size();
  if (n < 20) {
    throw_error(ErrorCode::too_short,
                "bandwidth selection needs at least 20 residuals");
  }
  if (!residuals.allFinite()) {
    throw_error(ErrorCode::non_finite, "residuals have NaN/Inf entries");
  }

  BandwidthResult result;
  const double mean = residuals.mean();
  const Eigen::VectorXd centered = (residuals.array() - mean).matrix();
  const double denom = centered.squaredNorm();
  if (denom == 0.0) {
    result.k_n = 1.0;
    result.m_hat = 0;
    result.degenerate = true;
    return result;
  }

  const double nd = static_cast<double>(n);
  const Eigen::Index k_max =
      static_cast<Eigen::Index>(std::ceil(std::sqrt(nd)));
  const Eigen::Index k_t = std::max<Eigen::Index>(
      5, static_cast<Eigen::Index>(std::ceil(std::sqrt(std::log10(nd)))));
  const double band = 2.0 * std::sqrt(std::log10(nd) / nd);

  const Eigen::Index max_lag = std::min(n - 1, k_max + k_t);
  result.acf.resize(static_cast<std::size_t>(max_lag));
  for (Eigen::Index k = 1; k <= max_lag; ++k) {
    double num = 0.0;
    for (Eigen::Index t = 0; t + k < n; ++t) {
      num += centered(t) * centered(t + k);
    }
    result.acf[static_cast<std::size_t>(k - 1)] = num / denom;
  }

  auto acf_below_band = [&](Eigen::Index k) {
    // lags beyond the computed range count as negligible
    if (k > max_lag) return true;
    return std::abs(result.acf[static_cast<std::size_t>(k - 1)]) < band;
  };

  Eigen::Index m_hat = k_max;
  for (Eigen::Index m = 0; m <= k_max; ++m) {
    bool all_below = true;
    for (Eigen::Index k = m + 1; k <= m + k_t; ++k) {
      if (!acf_below_band(k)) {
        all_below = false;
        break;
      }
    }
    if (all_below) {
      m_hat = m;
      break;
    }
  }

  result.m_hat = m_hat;
  const double cap = std::ceil(nd / 2.0);
  result.k_n = std::max(1.0, std::min(static_cast<double>(2 * m_hat + 1), cap));
  return result;
}

}  // namespace dtr
