#pragma once

#include <vector>

#include "tsg/construction.hpp"
#include "tsg/process.hpp"

namespace tsg::infer {

enum class KernelShape { Epanechnikov, Triangular, Uniform };

struct KernelSpec {
  KernelShape shape = KernelShape::Epanechnikov;
  double bandwidth = 0.1;  // in (0, 1/2)

  void validate() const;
  double operator()(double u) const;  // support [-1, 1]
};

// Time-varying threshold-AR fit on a rescaled-time grid.  theta_hat row g
// holds (theta1, theta2) at grid[g]; m_matrix is the local weighted design
// moment matrix.  half_width is the simultaneous band radius (constant
// across the grid) once simultaneous_band has run.
struct BandResult {
  std::vector<double> grid;
  Eigen::MatrixXd theta_hat;               // grid_count x 2
  std::vector<Eigen::Matrix2d> m_matrix;   // per grid point
  double n = 0;
  double half_width = 0;
  double level = 0;
};

// 64 (by default) equispaced points strictly inside (b, 1-b).
std::vector<double> default_grid(double bandwidth, int count = 64);

// Kernel-weighted least squares of Y_i on (max(Y_{i-1},0), min(Y_{i-1},0))
// at each grid point.  Throws on singular local designs or fewer than 8
// effective observations, naming the grid point.
BandResult fit_tvtar(const SamplePath& y, const KernelSpec& kernel,
                     const std::vector<double>& grid);

struct BandwidthReport {
  double e1 = 0;  // 1/p - (1-beta)/2 : Gaussian-approximation exponent
  double e2 = 0;  // (1-beta)/2 - alpha*beta : bias exponent
  bool admissible = false;
  double window_lo = 0, window_hi = 0;  // (1/(1+2alpha), 1-2/p)
  bool window_empty = false;
};

BandwidthReport bandwidth_check(double p, double beta, double alpha);

// Completes `fit` with the level-quantile of the surrogate max statistic.
// covs/scheme describe the bivariate score process X_i = v_i e_i; each
// surrogate path spreads block covariance V_j evenly over the block's time
// points so kernel windows narrower than a block keep the right variance.
BandResult simultaneous_band(BandResult fit, const gauss::BlockCovariances& covs,
                             const gauss::BlockingScheme& scheme, const KernelSpec& kernel,
                             double level, int reps, std::uint64_t seed);

// Bartlett lag-window long-run covariance; negative eigenvalues clipped to
// zero (flagged through *clipped when non-null).
Eigen::MatrixXd longrun_cov_estimate(const SamplePath& w, int lag_window,
                                     bool* clipped = nullptr);

struct ChangePointStat {
  Eigen::VectorXd cusum_path;  // |PS_i - (i/n) PS_n|_inf / sqrt(n)
  double statistic = 0;
  double q90 = 0, q95 = 0, q99 = 0;  // surrogate Brownian-bridge quantiles
};

ChangePointStat cusum_covariance(const SamplePath& w, const Eigen::MatrixXd& sigma_w,
                                 int surrogate_reps = 500, std::uint64_t seed = 0x0C05);

}  // namespace tsg::infer
