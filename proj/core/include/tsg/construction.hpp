#pragma once

#include <vector>

#include "tsg/process.hpp"
#include "tsg/rates.hpp"

namespace tsg::gauss {

// Truncation level, m-dependence depth and block geometry for a path of
// length n under a (p, chi, A) rate plan.
struct BlockingScheme {
  int n = 0;
  double p = 0;
  double t_n = 0;         // (log log max(n,16))^{-1/2}
  double trunc_level = 0; // t_n * n^{1/p}
  int m = 0;              // floor(n^L * t_n^k), k = k_max/2
  int k0 = 0;             // floor(theta02^2 / lambda_star) + 2
  int block_len = 0;      // 2 * k0 * m
  int q = 0;              // complete blocks
  rates::RatePoint plan;

  // 1-based time index -> number of completed blocks.
  int q_index(int i) const { return i / block_len; }
};

// Throws ConfigError for n < 256 or lambda_star_hat <= 0; throws a
// degenerate-scheme error when fewer than 8 complete blocks fit.
BlockingScheme make_scheme(int n, double p, double chi, double a_log,
                           double theta02, double lambda_star_hat);

// Coordinatewise clamp to [-b, b].
Eigen::VectorXd truncate_vec(const Eigen::VectorXd& v, double b);
Eigen::MatrixXd truncate_rows(const Eigen::MatrixXd& rows, double b);

struct MDepOptions {
  int resamples = 64;               // ghost streams in the conditional mean
  std::uint64_t ghost_seed = 0x51DEC0DEull;
};

// The three coupled paths of the construction, all driven by one
// innovation stream: the raw process, its truncated-and-centered version,
// and the m-dependent conditional-expectation version.
struct PreparedPaths {
  Eigen::MatrixXd raw;        // n x d
  Eigen::MatrixXd truncated;  // n x d, centered
  Eigen::MatrixXd mdep;       // n x d, centered
};

PreparedPaths prepare_paths(const ProcessSpec& spec, const Eigen::MatrixXd& eps,
                            int burn, const BlockingScheme& scheme,
                            const MDepOptions& opts = {});

// Centered m-dependent values only.
Eigen::MatrixXd m_dependent_values(const ProcessSpec& spec, const Eigen::MatrixXd& eps,
                                   int burn, const BlockingScheme& scheme,
                                   const MDepOptions& opts = {});

struct BlockSums {
  Eigen::MatrixXd sums;      // q x d block sums A_j
  Eigen::MatrixXd skeleton;  // (n+1) x d blocked partial sums, row i = S_i
};

// Block sums of the given values under the scheme; the skeleton holds the
// last completed block's total through partial blocks and the tail.
BlockSums block_sums(const Eigen::MatrixXd& values, const BlockingScheme& scheme);

// Smallest eigenvalue of Var(S_{t+l} - S_t)/l, minimized over a probe grid
// of window starts.  A result <= 0 means the variance floor fails and the
// construction must not proceed.
double lambda_star_estimate(const ProcessSpec& spec, int l, int reps, std::uint64_t seed);

struct DefinitizeResult {
  Eigen::MatrixXd v;
  bool replaced = false;
};

// V unchanged when its smallest eigenvalue >= delta_star*m, else
// (delta_star*m) I.
DefinitizeResult positive_definitize(const Eigen::MatrixXd& v, int m, double delta_star);

struct BlockCovariances {
  std::vector<Eigen::MatrixXd> v;       // per-block, after definitization
  std::vector<Eigen::MatrixXd> v_sqrt;
  std::vector<bool> replaced;
  double delta_star = 0;
  double lambda_star_hat = 0;
};

// Monte-Carlo block-sum covariances of the m-dependent process.
BlockCovariances estimate_block_covs(const ProcessSpec& spec, const BlockingScheme& scheme,
                                     int reps, std::uint64_t seed, double lambda_star_hat,
                                     const MDepOptions& opts = {});

// Monte-Carlo block-sum covariances of the raw (untruncated) process.  At
// small n the truncation level and conditional-expectation window can bite
// into the variance; calibration targets that must cover raw-data
// statistics should use this variant.
BlockCovariances raw_block_covs(const ProcessSpec& spec, const BlockingScheme& scheme,
                                int reps, std::uint64_t seed, double lambda_star_hat);

// Exact covariances block_len * longrun_cov for an i.i.d.-increment null.
BlockCovariances exact_block_covs(const Eigen::MatrixXd& longrun_cov,
                                  const BlockingScheme& scheme, double lambda_star_hat);

// Gaussian partial-sum path with independent block increments
// V_j^{1/2} Z_j placed at block ends (piecewise-constant skeleton).
SamplePath gaussian_surrogate(const BlockCovariances& covs, const BlockingScheme& scheme,
                              std::uint64_t seed);

struct CouplingReport {
  int n = 0;
  std::uint64_t seed = 0;
  double stage1 = 0;  // max_i |S_i - S_i_trunc|
  double stage2 = 0;  // max_i |S_i_trunc - S_i_mdep|
  double stage3 = 0;  // max_i |S_i_mdep - S_i_skeleton|
  double total = 0;   // max_i |S_i - S_i_skeleton|
};

// One shared innovation stream through all stages — a genuine coupling.
CouplingReport coupling_report(const ProcessSpec& spec, const BlockingScheme& scheme,
                               std::uint64_t seed, const MDepOptions& opts = {});

enum class GapFunctional { MaxNorm, EndpointNorm };

// Two-sample KS distance between functional(S)/sqrt(n) over fresh
// simulations and functional(G)/sqrt(n) over surrogate draws.
double distributional_gap(const ProcessSpec& spec, const BlockingScheme& scheme,
                          const BlockCovariances& covs, GapFunctional functional,
                          int reps, std::uint64_t seed);

// Right-hand side of the truncated-dependence inequality
// 2 n^{1/p-1/gamma} t_n^{1-p/gamma} delta_{j,p}^{p/gamma}.
double truncated_delta_bound(double delta_jp, int n, double p, double gamma, double t_n);

struct TruncatedDelta {
  double value = 0;
  double std_error = 0;
};

// MC estimate of the lag-j coupling distance of the truncated m-dependent
// process at moment order gamma (the left-hand side of the bound above).
TruncatedDelta truncated_mdep_delta(const ProcessSpec& spec, const BlockingScheme& scheme,
                                    int j, double gamma, int reps, std::uint64_t seed,
                                    const MDepOptions& opts = {});

}  // namespace tsg::gauss
