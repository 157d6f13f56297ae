#include "tsg/dependence.hpp"

#include <cmath>

#include "tsg/util.hpp"

namespace tsg::dep {

DependenceProfile DependenceProfile::from_deltas(double r, std::vector<double> deltas) {
  DependenceProfile p;
  p.moment_order = r;
  for (double d : deltas)
    if (d < 0) throw ConfigError("dependence profile: negative delta");
  p.deltas = std::move(deltas);
  p.theta_tails.assign(p.deltas.size(), 0.0);
  double acc = 0;
  for (std::size_t i = p.deltas.size(); i-- > 0;) {
    acc += p.deltas[i];
    p.theta_tails[i] = acc;
  }
  return p;
}

double analytic_delta_linear(const std::vector<Eigen::MatrixXd>& coeffs,
                             const InnovationLaw& law, double r, int j,
                             int mc_draws, std::uint64_t seed) {
  if (j < 0 || j >= static_cast<int>(coeffs.size()))
    throw std::out_of_range("analytic_delta_linear: no stored coefficient for this lag");
  const Eigen::MatrixXd& b = coeffs[static_cast<std::size_t>(j)];
  if (b.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  if (law.family == InnovationFamily::Gaussian && r == 2.0) {
    // B(eps-eps') is Gaussian with covariance 2 B Sigma B^T.
    return std::sqrt(2.0 * (b * law.sigma * b.transpose()).trace());
  }
  auto rng = make_engine(seed);
  double acc = 0;
  for (int i = 0; i < mc_draws; ++i) {
    Eigen::MatrixXd pair = law.sample(2, rng);
    double nrm = (b * (pair.row(0) - pair.row(1)).transpose()).norm();
    acc += std::pow(nrm, r);
  }
  return std::pow(acc / mc_draws, 1.0 / r);
}

namespace {

constexpr int kProbeCount = 16;

struct ProbeStats {
  double mean = 0, var_of_mean = 0;
};

// Per-probe mean and variance of |X_i - X_i'|^r across replications.
std::vector<ProbeStats> coupled_moments(const ProcessSpec& spec, int j, double r,
                                        int reps, int history_len, std::uint64_t seed) {
  auto proc = make_process(spec);
  const int d = proc->dim();
  const int dt = proc->total_dim();
  const int total = history_len + kProbeCount;
  std::vector<int> probes(kProbeCount);
  for (int k = 0; k < kProbeCount; ++k)
    probes[static_cast<std::size_t>(k)] =
        j + static_cast<int>(static_cast<long long>(total - 1 - j) * k / (kProbeCount - 1));

  Eigen::MatrixXd samples(reps, kProbeCount);
  const double du = 1.0 / static_cast<double>(total);
  parallel_for(reps, [&](int rep) {
    auto rng = make_engine(seed_stream(seed, static_cast<std::uint64_t>(rep)));
    Eigen::MatrixXd eps = spec.innovation.sample(total + 1, rng);
    Eigen::MatrixXd path(total, dt);
    proc->run(eps, path, 0, total, du, du);
    Eigen::MatrixXd scratch = path;
    const Eigen::RowVectorXd fresh = eps.row(total);  // the independent copy
    for (int k = 0; k < kProbeCount; ++k) {
      int i = probes[static_cast<std::size_t>(k)];
      int t0 = i - j;
      Eigen::RowVectorXd saved_eps = eps.row(t0);
      eps.row(t0) = fresh;
      scratch.middleRows(t0, j + 1) = path.middleRows(t0, j + 1);
      proc->run(eps, scratch, t0, i + 1, du, du);
      double diff = (scratch.row(i).head(d) - path.row(i).head(d)).norm();
      samples(rep, k) = std::pow(diff, r);
      eps.row(t0) = saved_eps;
    }
  });

  std::vector<ProbeStats> stats(kProbeCount);
  for (int k = 0; k < kProbeCount; ++k) {
    double mean = samples.col(k).mean();
    double var = (samples.col(k).array() - mean).square().sum() / std::max(1, reps - 1);
    stats[static_cast<std::size_t>(k)] = {mean, var / reps};
  }
  return stats;
}

McDelta estimate_once(const ProcessSpec& spec, int j, double r, int reps,
                      int history_len, std::uint64_t seed) {
  auto stats = coupled_moments(spec, j, r, reps, history_len, seed);
  McDelta out;
  double best_mean = 0, best_se2 = 0;
  for (const auto& s : stats) {
    if (s.mean >= best_mean) {
      best_mean = s.mean;
      best_se2 = s.var_of_mean;
    }
  }
  if (best_mean <= 0) return out;  // exact zero coupling
  out.value = std::pow(best_mean, 1.0 / r);
  // Delta method for mean^{1/r}.
  out.std_error = std::sqrt(best_se2) / r * std::pow(best_mean, 1.0 / r - 1.0);
  return out;
}

}  // namespace

McDelta mc_delta(const ProcessSpec& spec, int j, double r, int reps,
                 int history_len, std::uint64_t seed, bool doubling_check) {
  if (j < 0) throw ConfigError("mc_delta: negative lag");
  if (reps < 2) throw ConfigError("mc_delta: need at least 2 replications");
  if (history_len < kProbeCount) throw ConfigError("mc_delta: history too short");
  spec.validate();
  McDelta out = estimate_once(spec, j, r, reps, history_len, seed);
  out.doubled_value = out.value;
  if (doubling_check) {
    McDelta twice = estimate_once(spec, j, r, reps, 2 * history_len, seed + 1);
    out.doubled_value = twice.value;
    double se = std::sqrt(out.std_error * out.std_error + twice.std_error * twice.std_error);
    out.converged = std::abs(twice.value - out.value) <= 2 * se || se == 0;
  }
  return out;
}

DependenceProfile mc_profile(const ProcessSpec& spec, double r, int max_lag,
                             int reps, int history_len, std::uint64_t seed) {
  std::vector<double> deltas, errs;
  for (int j = 0; j <= max_lag; ++j) {
    McDelta d = mc_delta(spec, j, r, reps, history_len, seed_stream(seed, 1000 + j));
    deltas.push_back(d.value);
    errs.push_back(d.std_error);
  }
  DependenceProfile p = DependenceProfile::from_deltas(r, std::move(deltas));
  p.std_errors = std::move(errs);
  p.replications = reps;
  p.path_length = history_len;
  return p;
}

double theta_tail(const DependenceProfile& profile, int i, TailModel model) {
  if (i < 0) throw ConfigError("theta_tail: negative index");
  const auto& d = profile.deltas;
  int last = static_cast<int>(d.size()) - 1;
  double stored = 0;
  for (int j = std::min(i, last + 1); j <= last; ++j) stored += d[static_cast<std::size_t>(j)];
  double beyond = 0;
  switch (model) {
    case TailModel::None:
      break;
    case TailModel::Geometric: {
      if (last >= 1 && d[static_cast<std::size_t>(last)] > 0 &&
          d[static_cast<std::size_t>(last - 1)] > 0) {
        double rho = d[static_cast<std::size_t>(last)] / d[static_cast<std::size_t>(last - 1)];
        if (rho >= 1.0) throw ConfigError("theta_tail: fitted geometric ratio >= 1, not summable");
        // Geometric tail starting at lag max(i, last+1).
        int start = std::max(i, last + 1);
        beyond = d[static_cast<std::size_t>(last)] * std::pow(rho, start - last) / (1.0 - rho);
      }
      break;
    }
    case TailModel::PolynomialLog: {
      // Fit log delta_j ~ c - s log j on the stored upper half; the tail
      // integral converges only when s > 1 (i.e. chi = s - 1 > 0).
      int lo = std::max(2, last / 2), cnt = 0;
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (int j = lo; j <= last; ++j) {
        double v = d[static_cast<std::size_t>(j)];
        if (v <= 0) continue;
        double x = std::log(static_cast<double>(j)), y = std::log(v);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++cnt;
      }
      if (cnt >= 2) {
        double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
        double s = -slope;
        if (s <= 1.0)
          throw ConfigError("theta_tail: fitted polynomial tail not summable (chi <= 0)");
        double c = std::exp((sy - slope * sx) / cnt);
        int start = std::max(i, last + 1);
        // integral upper bound of c * j^{-s} from start-1/2
        beyond = c * std::pow(start - 0.5, 1.0 - s) / (s - 1.0);
      }
      break;
    }
  }
  return stored + beyond;
}

DecayFit fit_decay(const DependenceProfile& profile, int lo, int hi) {
  if (lo < 3) throw ConfigError("fit_decay: range must start at i >= 3");
  if (hi - lo + 1 < 4) throw ConfigError("fit_decay: range shorter than 4 points");
  if (hi >= static_cast<int>(profile.theta_tails.size()))
    throw ConfigError("fit_decay: range exceeds stored tail sums");

  auto fit_range = [&](int a, int b, double* rmse) {
    int rows = b - a + 1;
    Eigen::MatrixXd x(rows, 3);
    Eigen::VectorXd y(rows);
    for (int i = a; i <= b; ++i) {
      double th = profile.theta_tails[static_cast<std::size_t>(i)];
      if (th <= 0) throw ConfigError("fit_decay: nonpositive tail sum in range");
      double li = std::log(static_cast<double>(i));
      x(i - a, 0) = 1.0;
      x(i - a, 1) = -li;
      x(i - a, 2) = -std::log(li);
      y(i - a) = std::log(th);
    }
    Eigen::Vector3d beta = x.colPivHouseholderQr().solve(y);
    if (rmse) *rmse = std::sqrt((x * beta - y).squaredNorm() / rows);
    return beta;
  };

  DecayFit out;
  out.lo = lo;
  out.hi = hi;
  double rmse = 0;
  Eigen::Vector3d beta = fit_range(lo, hi, &rmse);
  out.intercept = beta(0);
  out.chi_hat = beta(1);
  out.a_hat = beta(2);
  out.rmse = rmse;
  // Geometric decay masquerades as polynomial with chi growing in the
  // range; compare against the fit on the lower half.
  int mid = lo + (hi - lo) / 2;
  if (mid - lo + 1 >= 4) {
    Eigen::Vector3d half = fit_range(lo, mid, nullptr);
    if (half(1) > 0 && beta(1) > 1.25 * half(1)) out.super_polynomial = true;
  }
  return out;
}

double covariance_process_delta(double sup_norm_q, double delta_jq, double q) {
  if (!(q > 4.0)) throw ConfigError("covariance_process_delta needs moment order q > 4");
  if (sup_norm_q < 0 || delta_jq < 0) throw ConfigError("covariance_process_delta: negative inputs");
  return 2.0 * sup_norm_q * delta_jq;
}

}  // namespace tsg::dep
