#include "tsg/inference.hpp"

#include <cmath>

#include "tsg/linalg.hpp"
#include "tsg/util.hpp"

namespace tsg::infer {

void KernelSpec::validate() const {
  if (!(bandwidth > 0 && bandwidth < 0.5))
    throw ConfigError("kernel bandwidth must lie in (0, 1/2)");
}

double KernelSpec::operator()(double u) const {
  double a = std::abs(u);
  if (a >= 1.0) return 0.0;
  switch (shape) {
    case KernelShape::Epanechnikov: return 0.75 * (1.0 - u * u);
    case KernelShape::Triangular: return 1.0 - a;
    case KernelShape::Uniform: return 0.5;
  }
  return 0.0;
}

std::vector<double> default_grid(double bandwidth, int count) {
  if (count < 1) throw ConfigError("default_grid: need at least one point");
  std::vector<double> g(static_cast<std::size_t>(count));
  double lo = bandwidth, hi = 1.0 - bandwidth;
  for (int i = 0; i < count; ++i)
    g[static_cast<std::size_t>(i)] =
        lo + (hi - lo) * (i + 1.0) / (count + 1.0);
  return g;
}

BandResult fit_tvtar(const SamplePath& y, const KernelSpec& kernel,
                     const std::vector<double>& grid) {
  kernel.validate();
  if (y.d != 1) throw ConfigError("fit_tvtar expects a scalar path");
  const int n = y.n;
  const double b = kernel.bandwidth;
  BandResult out;
  out.grid = grid;
  out.n = n;
  out.theta_hat.resize(static_cast<int>(grid.size()), 2);
  out.m_matrix.resize(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double t = grid[g];
    if (!(t > b && t < 1.0 - b))
      throw ConfigError("fit_tvtar: grid point " + std::to_string(t) +
                        " outside the bandwidth-trimmed interval");
    Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
    Eigen::Vector2d rhs = Eigen::Vector2d::Zero();
    int effective = 0;
    // Value at row i sits at rescaled time (i+1)/n.
    int lo = std::max(1, static_cast<int>(std::floor((t - b) * n)) - 1);
    int hi = std::min(n - 1, static_cast<int>(std::ceil((t + b) * n)) + 1);
    for (int i = lo; i <= hi; ++i) {
      double u = (static_cast<double>(i) + 1.0) / n;
      double w = kernel((u - t) / b);
      if (w <= 0) continue;
      ++effective;
      double prev = y.values(i - 1, 0);
      Eigen::Vector2d v(std::max(prev, 0.0), std::min(prev, 0.0));
      m.noalias() += w * v * v.transpose();
      rhs.noalias() += w * v * y.values(i, 0);
    }
    if (effective < 8)
      throw ConfigError("fit_tvtar: fewer than 8 effective observations at t = " +
                        std::to_string(t));
    m /= n * b;
    rhs /= n * b;
    double det = m.determinant();
    if (!(std::abs(det) > 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff())))
      throw ConfigError("fit_tvtar: singular local design at t = " + std::to_string(t) +
                        " (all local values one-signed?)");
    out.theta_hat.row(static_cast<int>(g)) = m.inverse() * rhs;
    out.m_matrix[g] = m;
  }
  return out;
}

BandwidthReport bandwidth_check(double p, double beta, double alpha) {
  if (!(beta > 0 && beta < 1)) throw ConfigError("bandwidth_check: beta must lie in (0,1)");
  if (!(alpha > 0 && alpha <= 1)) throw ConfigError("bandwidth_check: alpha must lie in (0,1]");
  if (!(p > 2)) throw ConfigError("bandwidth_check: p must exceed 2");
  BandwidthReport r;
  r.e1 = 1.0 / p - (1.0 - beta) / 2.0;
  r.e2 = (1.0 - beta) / 2.0 - alpha * beta;
  r.admissible = r.e1 < 0 && r.e2 < 0;
  r.window_lo = 1.0 / (1.0 + 2.0 * alpha);
  r.window_hi = 1.0 - 2.0 / p;
  r.window_empty = !(r.window_lo < r.window_hi);
  return r;
}

BandResult simultaneous_band(BandResult fit, const gauss::BlockCovariances& covs,
                             const gauss::BlockingScheme& scheme, const KernelSpec& kernel,
                             double level, int reps, std::uint64_t seed) {
  kernel.validate();
  if (!(level > 0 && level <= 1)) throw ConfigError("simultaneous_band: level in (0,1]");
  if (reps < 100) throw ConfigError("simultaneous_band: need at least 100 surrogate draws");
  const int ns = scheme.n;
  const double nb = fit.n * kernel.bandwidth;
  const int gc = static_cast<int>(fit.grid.size());

  // Per-time covariance square roots: block j's covariance spread evenly
  // over its block_len time points (partial tail reuses the last block).
  std::vector<Eigen::Matrix2d> step_sqrt(static_cast<std::size_t>(scheme.q));
  for (int j = 0; j < scheme.q; ++j)
    step_sqrt[static_cast<std::size_t>(j)] =
        covs.v_sqrt[static_cast<std::size_t>(j)] / std::sqrt(static_cast<double>(scheme.block_len));

  // Precompute kernel weights: for each grid point the contributing time
  // range and weights.
  std::vector<int> w_lo(static_cast<std::size_t>(gc));
  std::vector<std::vector<double>> w(static_cast<std::size_t>(gc));
  for (int g = 0; g < gc; ++g) {
    double t = fit.grid[static_cast<std::size_t>(g)];
    int lo = std::max(0, static_cast<int>(std::floor((t - kernel.bandwidth) * ns)) - 2);
    int hi = std::min(ns - 1, static_cast<int>(std::ceil((t + kernel.bandwidth) * ns)) + 2);
    w_lo[static_cast<std::size_t>(g)] = lo;
    auto& wg = w[static_cast<std::size_t>(g)];
    wg.resize(static_cast<std::size_t>(hi - lo + 1));
    for (int i = lo; i <= hi; ++i) {
      double u = (static_cast<double>(i) + 1.0) / ns;
      wg[static_cast<std::size_t>(i - lo)] = kernel((u - t) / kernel.bandwidth);
    }
  }

  std::vector<double> maxima(static_cast<std::size_t>(reps));
  parallel_for(reps, [&](int rep) {
    auto rng = make_engine(seed_stream(seed, static_cast<std::uint64_t>(rep)));
    std::normal_distribution<double> gdist(0.0, 1.0);
    Eigen::MatrixXd incr(ns, 2);
    for (int i = 0; i < ns; ++i) {
      int j = std::min(i / scheme.block_len, scheme.q - 1);
      Eigen::Vector2d z(gdist(rng), gdist(rng));
      incr.row(i) = (step_sqrt[static_cast<std::size_t>(j)] * z).transpose();
    }
    double mx = 0;
    for (int g = 0; g < gc; ++g) {
      Eigen::Vector2d s = Eigen::Vector2d::Zero();
      const auto& wg = w[static_cast<std::size_t>(g)];
      int lo = w_lo[static_cast<std::size_t>(g)];
      for (std::size_t k = 0; k < wg.size(); ++k)
        if (wg[k] > 0) s += wg[k] * incr.row(lo + static_cast<int>(k)).transpose();
      Eigen::Vector2d dev = fit.m_matrix[static_cast<std::size_t>(g)].inverse() * (s / nb);
      mx = std::max(mx, dev.cwiseAbs().maxCoeff());
    }
    maxima[static_cast<std::size_t>(rep)] = mx;
  });

  fit.half_width = quantile(std::move(maxima), level);
  fit.level = level;
  return fit;
}

Eigen::MatrixXd longrun_cov_estimate(const SamplePath& w, int lag_window, bool* clipped) {
  if (lag_window < 0) throw ConfigError("longrun_cov_estimate: negative lag window");
  if (lag_window >= w.n / 4)
    throw ConfigError("longrun_cov_estimate: lag window must be below n/4");
  const int n = w.n, d = w.d;
  Eigen::RowVectorXd mean = w.values.colwise().mean();
  Eigen::MatrixXd c = w.values.rowwise() - mean;
  Eigen::MatrixXd sigma = c.transpose() * c / static_cast<double>(n);
  for (int k = 1; k <= lag_window; ++k) {
    double taper = 1.0 - static_cast<double>(k) / (lag_window + 1.0);
    Eigen::MatrixXd gk =
        c.topRows(n - k).transpose() * c.bottomRows(n - k) / static_cast<double>(n);
    sigma += taper * (gk + gk.transpose());
  }
  sigma = ((sigma + sigma.transpose()) / 2.0).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
  if (es.eigenvalues().minCoeff() < 0) {
    if (clipped) *clipped = true;
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    sigma = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
  } else if (clipped) {
    *clipped = false;
  }
  return sigma;
}

ChangePointStat cusum_covariance(const SamplePath& w, const Eigen::MatrixXd& sigma_w,
                                 int surrogate_reps, std::uint64_t seed) {
  const int n = w.n, d = w.d;
  Eigen::MatrixXd root = psd_sqrt(sigma_w);  // validates PSD
  ChangePointStat out;
  out.cusum_path.resize(n);
  double rn = std::sqrt(static_cast<double>(n));
  const Eigen::RowVectorXd end = w.partial_sums.row(n);
  for (int i = 1; i <= n; ++i) {
    Eigen::RowVectorXd dev =
        w.partial_sums.row(i) - (static_cast<double>(i) / n) * end;
    out.cusum_path(i - 1) = dev.cwiseAbs().maxCoeff() / rn;
    out.statistic = std::max(out.statistic, out.cusum_path(i - 1));
  }

  // Brownian-bridge max |Sigma^{1/2} B(u)|_inf on a fixed grid.
  const int grid = 512;
  std::vector<double> stats(static_cast<std::size_t>(surrogate_reps));
  parallel_for(surrogate_reps, [&](int rep) {
    auto rng = make_engine(seed_stream(seed, static_cast<std::uint64_t>(rep)));
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd wpath(grid, d);
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(d);
    double sd = 1.0 / std::sqrt(static_cast<double>(grid));
    for (int k = 0; k < grid; ++k) {
      for (int c = 0; c < d; ++c) acc(c) += sd * g(rng);
      wpath.row(k) = acc;
    }
    double mx = 0;
    for (int k = 0; k < grid; ++k) {
      double u = static_cast<double>(k + 1) / grid;
      Eigen::VectorXd bridge = (wpath.row(k) - u * wpath.row(grid - 1)).transpose();
      mx = std::max(mx, (root * bridge).cwiseAbs().maxCoeff());
    }
    stats[static_cast<std::size_t>(rep)] = mx;
  });
  out.q90 = quantile(stats, 0.90);
  out.q95 = quantile(stats, 0.95);
  out.q99 = quantile(stats, 0.99);
  return out;
}

}  // namespace tsg::infer
