#pragma once

#include <optional>
#include <vector>

#include "tsg/process.hpp"

namespace tsg::dep {

// Lag-wise coupling distances delta_{j,r} and their tail sums Theta_i.
struct DependenceProfile {
  double moment_order = 2.0;
  std::vector<double> deltas;       // indexed by lag j >= 0
  std::vector<double> theta_tails;  // theta_tails[i] = sum_{j>=i} deltas[j]
  std::optional<double> fitted_chi, fitted_a;
  int replications = 0;
  int path_length = 0;
  std::vector<double> std_errors;  // per lag; empty for analytic profiles

  static DependenceProfile from_deltas(double r, std::vector<double> deltas);
};

// ||B_j (eps - eps')||_r for an i.i.d. innovation law: closed form for
// Gaussian r=2, Monte Carlo on the fixed linear form otherwise.
double analytic_delta_linear(const std::vector<Eigen::MatrixXd>& coeffs,
                             const InnovationLaw& law, double r, int j,
                             int mc_draws = 200000, std::uint64_t seed = 77);

struct McDelta {
  double value = 0;
  double std_error = 0;
  bool converged = true;    // doubling the history shifted < 2 std errors
  double doubled_value = 0; // estimate at twice the history length
};

// Monte Carlo estimate of sup_i ||X_i - X_{i,(i-j)}||_r; the sup runs over
// a fixed 16-point probe grid.  The coupled path replaces the single
// innovation eps_{i-j} by an independent copy and re-simulates forward.
McDelta mc_delta(const ProcessSpec& spec, int j, double r, int reps,
                 int history_len, std::uint64_t seed, bool doubling_check = false);

// Convenience: mc_delta over lags 0..max_lag assembled into a profile.
DependenceProfile mc_profile(const ProcessSpec& spec, double r, int max_lag,
                             int reps, int history_len, std::uint64_t seed);

enum class TailModel { None, Geometric, PolynomialLog };

// Theta_i from stored deltas plus a fitted extrapolation of the tail
// beyond the last stored lag.  Exact (model None) when deltas vanish there.
double theta_tail(const DependenceProfile& profile, int i, TailModel model);

struct DecayFit {
  double chi_hat = 0, a_hat = 0, intercept = 0, rmse = 0;
  int lo = 0, hi = 0;
  bool super_polynomial = false;
};

// Least squares of log Theta_i on (1, -log i, -log log i) over [lo, hi].
DecayFit fit_decay(const DependenceProfile& profile, int lo, int hi);

// Product bound 2 * sup_i||X_i||_q * delta_{j,q} for the quadratic
// (covariance) process at moment order q/2.
double covariance_process_delta(double sup_norm_q, double delta_jq, double q);

}  // namespace tsg::dep
