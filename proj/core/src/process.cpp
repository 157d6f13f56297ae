#include "tsg/process.hpp"

#include <cmath>

#include "tsg/linalg.hpp"
#include "tsg/util.hpp"

namespace tsg {

// ---------------------------------------------------------------- innovations

InnovationLaw InnovationLaw::gaussian(int d) {
  InnovationLaw law;
  law.family = InnovationFamily::Gaussian;
  law.sigma = Eigen::MatrixXd::Identity(d, d);
  return law;
}

InnovationLaw InnovationLaw::student_t(int d, double dof) {
  InnovationLaw law;
  law.family = InnovationFamily::StudentT;
  law.dof = dof;
  law.sigma = Eigen::MatrixXd::Identity(d, d);
  return law;
}

InnovationLaw InnovationLaw::scaled_uniform(int d) {
  InnovationLaw law;
  law.family = InnovationFamily::ScaledUniform;
  law.sigma = Eigen::MatrixXd::Identity(d, d);
  return law;
}

void InnovationLaw::validate(double moment_order) const {
  if (sigma.rows() == 0 || sigma.rows() != sigma.cols())
    throw ConfigError("innovation covariance must be a nonempty square matrix");
  if (!is_symmetric(sigma)) throw ConfigError("innovation covariance must be symmetric");
  if (min_eigenvalue(sigma) < -1e-10)
    throw ConfigError("innovation covariance must be positive semidefinite");
  if (family == InnovationFamily::StudentT && !(dof > moment_order))
    throw ConfigError("student-t innovations need dof > requested moment order");
}

Eigen::MatrixXd InnovationLaw::sample(int t, std::mt19937_64& rng) const {
  int d = dim();
  Eigen::MatrixXd z(t, d);
  switch (family) {
    case InnovationFamily::Gaussian: {
      std::normal_distribution<double> g(0.0, 1.0);
      for (int i = 0; i < t; ++i)
        for (int c = 0; c < d; ++c) z(i, c) = g(rng);
      break;
    }
    case InnovationFamily::StudentT: {
      // Standardized to unit variance so sigma stays a covariance.
      std::student_t_distribution<double> st(dof);
      double scale = std::sqrt((dof - 2.0) / dof);
      for (int i = 0; i < t; ++i)
        for (int c = 0; c < d; ++c) z(i, c) = st(rng) * scale;
      break;
    }
    case InnovationFamily::ScaledUniform: {
      double h = std::sqrt(3.0);
      std::uniform_real_distribution<double> u(-h, h);
      for (int i = 0; i < t; ++i)
        for (int c = 0; c < d; ++c) z(i, c) = u(rng);
      break;
    }
  }
  bool unit = sigma.isIdentity(1e-14);
  if (unit) return z;
  return z * psd_sqrt(sigma).transpose();
}

// ---------------------------------------------------------------------- curves

CoefficientCurve CoefficientCurve::constant(double c) {
  CoefficientCurve cc;
  cc.fn = [c](double) { return c; };
  cc.sup_abs = std::abs(c);
  return cc;
}

CoefficientCurve CoefficientCurve::linear(double intercept, double slope) {
  CoefficientCurve cc;
  cc.fn = [intercept, slope](double u) { return intercept + slope * u; };
  cc.sup_abs = std::max(std::abs(intercept), std::abs(intercept + slope));
  return cc;
}

// ----------------------------------------------------------------- spec setup

ProcessSpec ProcessSpec::ar1(double phi, InnovationLaw law) {
  ProcessSpec s;
  s.kind = ProcessKind::Varma;
  s.ar_coeffs = {Eigen::MatrixXd::Constant(1, 1, phi)};
  s.innovation = std::move(law);
  return s;
}

ProcessSpec ProcessSpec::vector_linear(std::vector<Eigen::MatrixXd> b, InnovationLaw law) {
  ProcessSpec s;
  s.kind = ProcessKind::VectorLinear;
  s.ma_coeffs = std::move(b);
  s.innovation = std::move(law);
  return s;
}

ProcessSpec ProcessSpec::varma(std::vector<Eigen::MatrixXd> ar,
                               std::vector<Eigen::MatrixXd> ma, InnovationLaw law) {
  ProcessSpec s;
  s.kind = ProcessKind::Varma;
  s.ar_coeffs = std::move(ar);
  s.varma_ma_coeffs = std::move(ma);
  s.innovation = std::move(law);
  return s;
}

ProcessSpec ProcessSpec::tvtar(CoefficientCurve th1, CoefficientCurve th2, InnovationLaw law) {
  ProcessSpec s;
  s.kind = ProcessKind::TvTar;
  s.theta1 = std::move(th1);
  s.theta2 = std::move(th2);
  s.innovation = std::move(law);
  return s;
}

ProcessSpec ProcessSpec::covariance_of(ProcessSpec base) {
  ProcessSpec s;
  s.kind = ProcessKind::CovarianceOf;
  s.innovation = base.innovation;
  s.base = std::make_shared<ProcessSpec>(std::move(base));
  return s;
}

int ProcessSpec::innovation_dim() const { return innovation.dim(); }

int ProcessSpec::dim() const {
  switch (kind) {
    case ProcessKind::VectorLinear:
      if (ma_coeffs.empty()) throw ConfigError("vector linear process needs coefficients");
      return static_cast<int>(ma_coeffs[0].rows());
    case ProcessKind::Varma:
      return innovation.dim();
    case ProcessKind::TvTar:
      return 1;
    case ProcessKind::TvTarScore:
      return 2;
    case ProcessKind::CovarianceOf: {
      int db = base->dim();
      return db * (db + 1) / 2;
    }
  }
  return 0;
}

int ProcessSpec::default_burn_in() const {
  switch (kind) {
    case ProcessKind::VectorLinear:
      return 0;  // explicit MA carries its full coefficient history
    case ProcessKind::CovarianceOf:
      return base->default_burn_in();
    default:
      return 1024;  // recursive kinds forget geometrically
  }
}

namespace {

double companion_spectral_radius(const std::vector<Eigen::MatrixXd>& ar, int d) {
  int a = static_cast<int>(ar.size());
  if (a == 0) return 0.0;
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(d * a, d * a);
  for (int k = 0; k < a; ++k) comp.block(0, k * d, d, d) = ar[static_cast<std::size_t>(k)];
  if (a > 1)
    comp.block(d, 0, d * (a - 1), d * (a - 1)) =
        Eigen::MatrixXd::Identity(d * (a - 1), d * (a - 1));
  return comp.eigenvalues().cwiseAbs().maxCoeff();
}

double tvtar_grid_sup(const CoefficientCurve& th1, const CoefficientCurve& th2) {
  double s = 0;
  for (int i = 0; i <= 1024; ++i) {
    double u = static_cast<double>(i) / 1024.0;
    s = std::max(s, std::abs(th1(u)) + std::abs(th2(u)));
  }
  return s;
}

}  // namespace

void ProcessSpec::validate() const {
  innovation.validate();
  int di = innovation.dim();
  switch (kind) {
    case ProcessKind::VectorLinear: {
      if (ma_coeffs.empty()) throw ConfigError("vector linear process needs coefficients");
      int d = dim();
      for (const auto& b : ma_coeffs)
        if (b.rows() != d || b.cols() != di)
          throw ConfigError("vector linear coefficient shape mismatch");
      break;
    }
    case ProcessKind::Varma: {
      for (const auto& m : ar_coeffs)
        if (m.rows() != di || m.cols() != di)
          throw ConfigError("autoregressive coefficient shape mismatch");
      for (const auto& m : varma_ma_coeffs)
        if (m.rows() != di || m.cols() != di)
          throw ConfigError("moving-average coefficient shape mismatch");
      double rho = companion_spectral_radius(ar_coeffs, di);
      if (!(rho < 1.0))
        throw ConfigError("unstable autoregression: companion spectral radius = " +
                          std::to_string(rho));
      break;
    }
    case ProcessKind::TvTar:
    case ProcessKind::TvTarScore: {
      if (di != 1) throw ConfigError("threshold AR requires scalar innovations");
      if (!theta1.fn || !theta2.fn) throw ConfigError("threshold AR needs both coefficient curves");
      double s = tvtar_grid_sup(theta1, theta2);
      if (!(s < 1.0))
        throw ConfigError("threshold AR contraction failure: sup(|th1|+|th2|) = " +
                          std::to_string(s));
      break;
    }
    case ProcessKind::CovarianceOf:
      if (!base) throw ConfigError("covariance process needs a base process");
      base->validate();
      break;
  }
}

// ------------------------------------------------------------------- kernels

namespace {

class VectorLinearProcess final : public Process {
 public:
  explicit VectorLinearProcess(const ProcessSpec& spec)
      : coeffs_(spec.ma_coeffs), d_(spec.dim()) {}
  int dim() const override { return d_; }
  int state_depth() const override { return 0; }
  int innovation_depth() const override { return static_cast<int>(coeffs_.size()) - 1; }
  void run(const Eigen::Ref<const Eigen::MatrixXd>& eps, Eigen::Ref<Eigen::MatrixXd> path,
           int t0, int t1, double, double) const override {
    int nj = static_cast<int>(coeffs_.size());
    for (int t = t0; t < t1; ++t) {
      Eigen::VectorXd x = Eigen::VectorXd::Zero(d_);
      int jmax = std::min(nj - 1, t);
      for (int j = 0; j <= jmax; ++j)
        x.noalias() += coeffs_[static_cast<std::size_t>(j)] * eps.row(t - j).transpose();
      path.row(t).head(d_) = x.transpose();
    }
  }

 private:
  std::vector<Eigen::MatrixXd> coeffs_;
  int d_;
};

class VarmaProcess final : public Process {
 public:
  explicit VarmaProcess(const ProcessSpec& spec)
      : ar_(spec.ar_coeffs), ma_(spec.varma_ma_coeffs), d_(spec.dim()) {}
  int dim() const override { return d_; }
  int state_depth() const override { return static_cast<int>(ar_.size()); }
  int innovation_depth() const override { return static_cast<int>(ma_.size()); }
  void run(const Eigen::Ref<const Eigen::MatrixXd>& eps, Eigen::Ref<Eigen::MatrixXd> path,
           int t0, int t1, double, double) const override {
    for (int t = t0; t < t1; ++t) {
      Eigen::VectorXd x = eps.row(t).transpose();
      for (std::size_t k = 0; k < ar_.size(); ++k) {
        int s = t - 1 - static_cast<int>(k);
        if (s >= 0) x.noalias() += ar_[k] * path.row(s).head(d_).transpose();
      }
      for (std::size_t k = 0; k < ma_.size(); ++k) {
        int s = t - 1 - static_cast<int>(k);
        if (s >= 0) x.noalias() += ma_[k] * eps.row(s).transpose();
      }
      path.row(t).head(d_) = x.transpose();
    }
  }

 private:
  std::vector<Eigen::MatrixXd> ar_, ma_;
  int d_;
};

inline double clamp_u(double u) { return u < 0 ? 0 : (u > 1 ? 1 : u); }

class TvTarProcess final : public Process {
 public:
  explicit TvTarProcess(const ProcessSpec& spec) : th1_(spec.theta1), th2_(spec.theta2) {}
  int dim() const override { return 1; }
  int state_depth() const override { return 1; }
  int innovation_depth() const override { return 0; }
  void run(const Eigen::Ref<const Eigen::MatrixXd>& eps, Eigen::Ref<Eigen::MatrixXd> path,
           int t0, int t1, double u0, double du) const override {
    for (int t = t0; t < t1; ++t) {
      double prev = t > 0 ? path(t - 1, 0) : 0.0;
      double u = clamp_u(u0 + du * t);
      // Signed parts: y = y+ + y-, so equal coefficients collapse to AR(1).
      path(t, 0) = th1_(u) * std::max(prev, 0.0) + th2_(u) * std::min(prev, 0.0) + eps(t, 0);
    }
  }

 private:
  CoefficientCurve th1_, th2_;
};

class TvTarScoreProcess final : public Process {
 public:
  explicit TvTarScoreProcess(const ProcessSpec& spec) : th1_(spec.theta1), th2_(spec.theta2) {}
  int dim() const override { return 2; }
  int aux_dim() const override { return 1; }  // the underlying series Y
  int state_depth() const override { return 1; }
  int innovation_depth() const override { return 0; }
  void run(const Eigen::Ref<const Eigen::MatrixXd>& eps, Eigen::Ref<Eigen::MatrixXd> path,
           int t0, int t1, double u0, double du) const override {
    for (int t = t0; t < t1; ++t) {
      double prev = t > 0 ? path(t - 1, 2) : 0.0;
      double u = clamp_u(u0 + du * t);
      double yp = std::max(prev, 0.0), ym = std::min(prev, 0.0);
      double e = eps(t, 0);
      path(t, 0) = yp * e;
      path(t, 1) = ym * e;
      path(t, 2) = th1_(u) * yp + th2_(u) * ym + e;
    }
  }

 private:
  CoefficientCurve th1_, th2_;
};

class CovarianceOfProcess final : public Process {
 public:
  explicit CovarianceOfProcess(const ProcessSpec& spec)
      : base_(make_process(*spec.base)), db_(spec.base->dim()) {}
  int dim() const override { return db_ * (db_ + 1) / 2; }
  int aux_dim() const override { return base_->total_dim(); }
  int state_depth() const override { return base_->state_depth(); }
  int innovation_depth() const override { return base_->innovation_depth(); }
  void run(const Eigen::Ref<const Eigen::MatrixXd>& eps, Eigen::Ref<Eigen::MatrixXd> path,
           int t0, int t1, double u0, double du) const override {
    int dw = dim();
    base_->run(eps, path.rightCols(base_->total_dim()), t0, t1, u0, du);
    for (int t = t0; t < t1; ++t) {
      int c = 0;
      for (int r = 0; r < db_; ++r)
        for (int s = r; s < db_; ++s, ++c)
          path(t, c) = path(t, dw + r) * path(t, dw + s);
    }
  }

 private:
  std::shared_ptr<const Process> base_;
  int db_;
};

}  // namespace

std::shared_ptr<const Process> make_process(const ProcessSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case ProcessKind::VectorLinear: return std::make_shared<VectorLinearProcess>(spec);
    case ProcessKind::Varma: return std::make_shared<VarmaProcess>(spec);
    case ProcessKind::TvTar: return std::make_shared<TvTarProcess>(spec);
    case ProcessKind::TvTarScore: return std::make_shared<TvTarScoreProcess>(spec);
    case ProcessKind::CovarianceOf: return std::make_shared<CovarianceOfProcess>(spec);
  }
  throw ConfigError("unknown process kind");
}

// --------------------------------------------------------------- simulation

SamplePath SamplePath::from_values(Eigen::MatrixXd v) {
  SamplePath p;
  p.n = static_cast<int>(v.rows());
  p.d = static_cast<int>(v.cols());
  p.values = std::move(v);
  p.partial_sums.resize(p.n + 1, p.d);
  p.partial_sums.row(0).setZero();
  for (int i = 0; i < p.n; ++i)
    p.partial_sums.row(i + 1) = p.partial_sums.row(i) + p.values.row(i);
  return p;
}

SamplePath simulate_with(const ProcessSpec& spec, const Eigen::MatrixXd& eps, int burn) {
  auto proc = make_process(spec);
  int total = static_cast<int>(eps.rows());
  int n = total - burn;
  if (n <= 0) throw ConfigError("simulate_with: innovation stream shorter than burn-in");
  Eigen::MatrixXd path(total, proc->total_dim());
  double du = 1.0 / static_cast<double>(n);
  double u0 = (1.0 - static_cast<double>(burn)) * du;
  proc->run(eps, path, 0, total, u0, du);
  return SamplePath::from_values(path.bottomRows(n).leftCols(proc->dim()));
}

SamplePath simulate(const ProcessSpec& spec, int n, std::uint64_t seed) {
  spec.validate();
  int burn = spec.burn();
  auto rng = make_engine(seed);
  Eigen::MatrixXd eps = spec.innovation.sample(burn + n, rng);
  return simulate_with(spec, eps, burn);
}

// ----------------------------------------------------------- analytic facts

std::vector<Eigen::MatrixXd> varma_to_ma(const ProcessSpec& spec, int lag_cutoff) {
  if (spec.kind != ProcessKind::Varma) throw ConfigError("varma_to_ma expects a VARMA spec");
  spec.validate();
  int d = spec.dim();
  std::vector<Eigen::MatrixXd> b;
  b.reserve(static_cast<std::size_t>(lag_cutoff) + 1);
  b.push_back(Eigen::MatrixXd::Identity(d, d));
  for (int j = 1; j <= lag_cutoff; ++j) {
    Eigen::MatrixXd bj = Eigen::MatrixXd::Zero(d, d);
    if (j <= static_cast<int>(spec.varma_ma_coeffs.size()))
      bj = spec.varma_ma_coeffs[static_cast<std::size_t>(j - 1)];
    for (std::size_t k = 0; k < spec.ar_coeffs.size() && static_cast<int>(k) < j; ++k)
      bj.noalias() += spec.ar_coeffs[k] * b[static_cast<std::size_t>(j) - k - 1];
    b.push_back(std::move(bj));
  }
  return b;
}

Eigen::MatrixXd longrun_cov_varma(const ProcessSpec& spec) {
  if (spec.kind != ProcessKind::Varma) throw ConfigError("longrun_cov_varma expects a VARMA spec");
  spec.validate();
  int d = spec.dim();
  Eigen::MatrixXd psi_star = Eigen::MatrixXd::Identity(d, d);
  for (const auto& m : spec.ar_coeffs) psi_star -= m;
  Eigen::MatrixXd phi_star = Eigen::MatrixXd::Identity(d, d);
  for (const auto& m : spec.varma_ma_coeffs) phi_star += m;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(psi_star);
  if (!lu.isInvertible()) throw ConfigError("long-run covariance: I - sum(AR) is singular");
  if (Eigen::FullPivLU<Eigen::MatrixXd>(phi_star).rank() < d)
    throw ConfigError("long-run covariance: I + sum(MA) is singular");
  Eigen::MatrixXd inv = lu.inverse();
  Eigen::MatrixXd core = phi_star * spec.innovation.sigma * phi_star.transpose();
  Eigen::MatrixXd out = inv * core * inv.transpose();
  return (out + out.transpose()) / 2.0;
}

SamplePath covariance_process(const SamplePath& path) {
  int d = path.d, n = path.n;
  int dw = d * (d + 1) / 2;
  Eigen::MatrixXd w(n, dw);
  for (int t = 0; t < n; ++t) {
    int c = 0;
    for (int r = 0; r < d; ++r)
      for (int s = r; s < d; ++s, ++c) w(t, c) = path.values(t, r) * path.values(t, s);
  }
  return SamplePath::from_values(std::move(w));
}

ContractionReport contraction_coefficient(const ProcessSpec& spec, int probe_count,
                                          std::uint64_t seed) {
  if (spec.kind != ProcessKind::TvTar && spec.kind != ProcessKind::TvTarScore)
    throw ConfigError("contraction_coefficient expects a threshold AR spec");
  ContractionReport rep;
  rep.s = tvtar_grid_sup(spec.theta1, spec.theta2);
  if (!(rep.s < 1.0))
    throw ConfigError("threshold AR contraction failure: sup(|th1|+|th2|) = " +
                      std::to_string(rep.s));
  auto rng = make_engine(seed);
  std::uniform_real_distribution<double> uu(0.0, 1.0);
  std::normal_distribution<double> gg(0.0, 4.0);
  for (int i = 0; i < probe_count; ++i) {
    double u = uu(rng);
    double x = gg(rng), xp = gg(rng);
    if (x == xp) continue;
    double fx = spec.theta1(u) * std::max(x, 0.0) + spec.theta2(u) * std::min(x, 0.0);
    double fxp = spec.theta1(u) * std::max(xp, 0.0) + spec.theta2(u) * std::min(xp, 0.0);
    rep.mc_max_ratio = std::max(rep.mc_max_ratio, std::abs(fx - fxp) / std::abs(x - xp));
  }
  return rep;
}

}  // namespace tsg
