#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <vector>

namespace tsg {

enum class InnovationFamily { Gaussian, StudentT, ScaledUniform };

// I.i.d. innovation law with mean zero and covariance sigma.  StudentT and
// ScaledUniform are standardized to unit variance per coordinate before the
// covariance factor is applied, so sigma always means covariance.
struct InnovationLaw {
  InnovationFamily family = InnovationFamily::Gaussian;
  double dof = 6.0;  // StudentT only
  Eigen::MatrixXd sigma;

  static InnovationLaw gaussian(int d);
  static InnovationLaw student_t(int d, double dof);
  static InnovationLaw scaled_uniform(int d);

  int dim() const { return static_cast<int>(sigma.rows()); }
  // Throws ConfigError when sigma is invalid or dof <= moment_order.
  void validate(double moment_order = 2.0) const;
  // t x d matrix of i.i.d. draws.
  Eigen::MatrixXd sample(int t, std::mt19937_64& rng) const;
};

// Coefficient curve on [0,1] for time-varying models.
struct CoefficientCurve {
  std::function<double(double)> fn;
  double sup_abs = 0.0;  // exact sup of |fn| on [0,1], declared by builder

  static CoefficientCurve constant(double c);
  static CoefficientCurve linear(double intercept, double slope);  // intercept + slope*u
  double operator()(double u) const { return fn(u); }
};

enum class ProcessKind {
  VectorLinear,  // X_i = sum_j B_j eps_{i-j}, finite coefficient list
  Varma,         // X_i = sum Psi_k X_{i-k} + eps_i + sum Phi_k eps_{i-k}
  TvTar,         // Y_i = th1(i/n) max(Y_{i-1},0) + th2(i/n) min(Y_{i-1},0) + e_i
  TvTarScore,    // bivariate score (max(Y_{i-1},0) e_i, min(Y_{i-1},0) e_i)
  CovarianceOf,  // W_i = (X_{ir} X_{is})_{r<=s} of a base process
};

struct ProcessSpec {
  ProcessKind kind = ProcessKind::VectorLinear;
  InnovationLaw innovation;

  std::vector<Eigen::MatrixXd> ma_coeffs;           // VectorLinear: B_0, B_1, ...
  std::vector<Eigen::MatrixXd> ar_coeffs;           // Varma: Psi_1..Psi_a
  std::vector<Eigen::MatrixXd> varma_ma_coeffs;     // Varma: Phi_1..Phi_b
  CoefficientCurve theta1, theta2;                  // TvTar / TvTarScore
  std::shared_ptr<const ProcessSpec> base;          // CovarianceOf

  int burn_in = -1;  // -1: kind-dependent default

  static ProcessSpec ar1(double phi, InnovationLaw law);
  static ProcessSpec vector_linear(std::vector<Eigen::MatrixXd> b, InnovationLaw law);
  static ProcessSpec varma(std::vector<Eigen::MatrixXd> ar,
                           std::vector<Eigen::MatrixXd> ma, InnovationLaw law);
  static ProcessSpec tvtar(CoefficientCurve th1, CoefficientCurve th2, InnovationLaw law);
  static ProcessSpec covariance_of(ProcessSpec base);

  // Output dimension (d(d+1)/2 for covariance processes, 2 for scores).
  int dim() const;
  int innovation_dim() const;
  int default_burn_in() const;
  int burn() const { return burn_in >= 0 ? burn_in : default_burn_in(); }
  // Throws ConfigError on invariant violations (instability, contraction
  // failure, shape mismatches).
  void validate() const;
};

struct SamplePath {
  int n = 0, d = 0;
  Eigen::MatrixXd values;        // n x d
  Eigen::MatrixXd partial_sums;  // (n+1) x d, row 0 = 0

  static SamplePath from_values(Eigen::MatrixXd v);
};

// Stateless recursion kernel behind a ProcessSpec.  Path buffers carry
// dim() output columns followed by aux_dim() hidden state columns (e.g. the
// underlying series of a score or covariance process), which is what makes
// partial re-simulation from a mid-path state exact.
class Process {
 public:
  virtual ~Process() = default;
  virtual int dim() const = 0;
  virtual int aux_dim() const { return 0; }
  int total_dim() const { return dim() + aux_dim(); }
  // How many preceding path rows / innovation rows row t depends on.
  virtual int state_depth() const = 0;
  virtual int innovation_depth() const = 0;
  // Fill path rows [t0, t1).  Reads eps rows (t - innovation_depth .. t]
  // and path rows [t0 - state_depth, t0); indices < 0 are treated as zero.
  // u(t) = u0 + du*t is the rescaled-time argument for time-varying kinds,
  // clamped to [0,1].
  virtual void run(const Eigen::Ref<const Eigen::MatrixXd>& eps,
                   Eigen::Ref<Eigen::MatrixXd> path, int t0, int t1, double u0,
                   double du) const = 0;
};

std::shared_ptr<const Process> make_process(const ProcessSpec& spec);

// Simulates n kept values after burn-in; deterministic in (spec, n, seed).
SamplePath simulate(const ProcessSpec& spec, int n, std::uint64_t seed);

// Same, but from a caller-supplied innovation matrix of (burn + n) rows.
SamplePath simulate_with(const ProcessSpec& spec, const Eigen::MatrixXd& eps, int burn);

// MA coefficients B_0..B_cutoff of a stable VARMA spec.
std::vector<Eigen::MatrixXd> varma_to_ma(const ProcessSpec& spec, int lag_cutoff);

// Psi_*^{-1} Phi_* Sigma_e Phi_*^T Psi_*^{-T} with Psi_* = I - sum Psi_k,
// Phi_* = I + sum Phi_k.
Eigen::MatrixXd longrun_cov_varma(const ProcessSpec& spec);

// W_i = (X_{ir} X_{is})_{r<=s}, lexicographic ordering (fixed wire format).
SamplePath covariance_process(const SamplePath& path);

struct ContractionReport {
  double s = 0;            // grid supremum of |theta1| + |theta2|
  double mc_max_ratio = 0; // largest probed |F(x)-F(x')|/|x-x'|
};
ContractionReport contraction_coefficient(const ProcessSpec& spec, int probe_count,
                                          std::uint64_t seed);

}  // namespace tsg
