#include "tsg/construction.hpp"

#include <cmath>
#include <limits>

#include "tsg/linalg.hpp"
#include "tsg/util.hpp"

namespace tsg::gauss {

BlockingScheme make_scheme(int n, double p, double chi, double a_log,
                           double theta02, double lambda_star_hat) {
  if (n < 256) throw ConfigError("make_scheme: need n >= 256");
  if (!(theta02 >= 0)) throw ConfigError("make_scheme: theta02 must be nonnegative");
  if (!(lambda_star_hat > 0))
    throw ConfigError("make_scheme: variance floor lambda_star <= 0, construction refused");

  BlockingScheme s;
  s.n = n;
  s.p = p;
  s.plan = rates::evaluate(p, chi);
  s.plan.a_ok = a_log >= s.plan.a_min || s.plan.regime == rates::Regime::SuperCritical;
  s.t_n = 1.0 / std::sqrt(std::log(std::log(static_cast<double>(std::max(n, 16)))));
  s.trunc_level = s.t_n * std::pow(static_cast<double>(n), 1.0 / p);

  double k = s.plan.k_max / 2.0;  // interior point of the admissible k range
  double m_real = std::pow(static_cast<double>(n), s.plan.cap_l) * std::pow(s.t_n, k);
  if (s.plan.log_factor) {
    double g = s.plan.gamma;
    m_real *= std::pow(std::log(static_cast<double>(n)), 2.0 * g / (g - 2.0));
  }
  s.m = std::max(1, static_cast<int>(std::floor(m_real)));
  s.k0 = static_cast<int>(std::floor(theta02 * theta02 / lambda_star_hat)) + 2;
  s.block_len = 2 * s.k0 * s.m;
  s.q = n / s.block_len;
  if (s.q < 8)
    throw ConfigError("make_scheme: degenerate scheme, only " + std::to_string(s.q) +
                      " complete blocks (need >= 8)");
  return s;
}

Eigen::VectorXd truncate_vec(const Eigen::VectorXd& v, double b) {
  if (!(b > 0)) throw ConfigError("truncate: level must be positive");
  return v.cwiseMax(-b).cwiseMin(b);
}

Eigen::MatrixXd truncate_rows(const Eigen::MatrixXd& rows, double b) {
  if (!(b > 0)) throw ConfigError("truncate: level must be positive");
  return rows.cwiseMax(-b).cwiseMin(b);
}

namespace {

// Fixed auxiliary innovation streams ("ghosts") with their full paths:
// averaging the truncated process over ghost pasts, holding the real
// window fixed, evaluates E(T(X_t) | eps_{t-m..t}).  The streams are
// seeded independently of the data, and identically across replications,
// so the conditional-mean approximation is one fixed window function.
struct GhostEnsemble {
  std::vector<Eigen::MatrixXd> eps;   // per ghost, total x d_innov
  std::vector<Eigen::MatrixXd> path;  // per ghost, total x total_dim

  GhostEnsemble(const ProcessSpec& spec, const Process& proc, int total,
                double u0, double du, const MDepOptions& opts) {
    eps.reserve(static_cast<std::size_t>(opts.resamples));
    path.reserve(static_cast<std::size_t>(opts.resamples));
    for (int g = 0; g < opts.resamples; ++g) {
      auto rng = make_engine(seed_stream(opts.ghost_seed, static_cast<std::uint64_t>(g)));
      eps.push_back(spec.innovation.sample(total, rng));
      Eigen::MatrixXd p(total, proc.total_dim());
      proc.run(eps.back(), p, 0, total, u0, du);
      path.push_back(std::move(p));
    }
  }
};

// E(T(X_t)) estimated per time index with the raw ghost value as control
// variate: mean_g [T(X_t^g) - X_t^g].  Exactly zero wherever truncation
// never binds (the process is mean zero).
Eigen::MatrixXd centering_offsets(const GhostEnsemble& ghosts, int d, int total, double b) {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(total, d);
  for (const auto& gp : ghosts.path) {
    const auto out = gp.leftCols(d);
    c += truncate_rows(out, b) - out;
  }
  return c / static_cast<double>(ghosts.path.size());
}

}  // namespace

PreparedPaths prepare_paths(const ProcessSpec& spec, const Eigen::MatrixXd& eps,
                            int burn, const BlockingScheme& scheme,
                            const MDepOptions& opts) {
  auto proc = make_process(spec);
  const int total = static_cast<int>(eps.rows());
  const int n = total - burn;
  if (n != scheme.n) throw ConfigError("prepare_paths: innovation stream does not match scheme length");
  const int d = proc->dim();
  const int dt = proc->total_dim();
  const double b = scheme.trunc_level;
  const int m = scheme.m;
  const double du = 1.0 / static_cast<double>(n);
  const double u0 = (1.0 - static_cast<double>(burn)) * du;

  Eigen::MatrixXd path(total, dt);
  proc->run(eps, path, 0, total, u0, du);

  GhostEnsemble ghosts(spec, *proc, total, u0, du, opts);
  const int R = opts.resamples;
  Eigen::MatrixXd centers = centering_offsets(ghosts, d, total, b);

  PreparedPaths out;
  out.raw = path.bottomRows(n).leftCols(d);
  out.truncated = truncate_rows(out.raw, b) - centers.bottomRows(n);
  out.mdep.resize(n, d);

  // Spliced re-simulation: real innovations on the window [t-m, t], ghost
  // innovations and ghost state before it.
  std::vector<Eigen::MatrixXd> scratch_eps = ghosts.eps;
  std::vector<Eigen::MatrixXd> scratch_path = ghosts.path;
  for (int j = 0; j < n; ++j) {
    int t = burn + j;
    int t0 = std::max(t - m, 0);
    int w = t - t0 + 1;
    // Accumulate deviations from the real truncated row so that ghost
    // pasts which cannot influence X_t contribute exactly zero.
    Eigen::RowVectorXd real_tr = truncate_vec(path.row(t).head(d).transpose(), b).transpose();
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(d);
    for (int g = 0; g < R; ++g) {
      auto& se = scratch_eps[static_cast<std::size_t>(g)];
      auto& sp = scratch_path[static_cast<std::size_t>(g)];
      se.middleRows(t0, w) = eps.middleRows(t0, w);
      proc->run(se, sp, t0, t + 1, u0, du);
      acc += truncate_vec(sp.row(t).head(d).transpose(), b).transpose() - real_tr;
      se.middleRows(t0, w) = ghosts.eps[static_cast<std::size_t>(g)].middleRows(t0, w);
      sp.middleRows(t0, w) = ghosts.path[static_cast<std::size_t>(g)].middleRows(t0, w);
    }
    out.mdep.row(j) = real_tr + acc / static_cast<double>(R) - centers.row(t);
  }
  return out;
}

Eigen::MatrixXd m_dependent_values(const ProcessSpec& spec, const Eigen::MatrixXd& eps,
                                   int burn, const BlockingScheme& scheme,
                                   const MDepOptions& opts) {
  return prepare_paths(spec, eps, burn, scheme, opts).mdep;
}

BlockSums block_sums(const Eigen::MatrixXd& values, const BlockingScheme& scheme) {
  const int n = static_cast<int>(values.rows());
  const int d = static_cast<int>(values.cols());
  if (n != scheme.n) throw ConfigError("block_sums: value matrix does not match scheme length");
  BlockSums out;
  out.sums.resize(scheme.q, d);
  for (int j = 0; j < scheme.q; ++j)
    out.sums.row(j) = values.middleRows(j * scheme.block_len, scheme.block_len).colwise().sum();
  out.skeleton.resize(n + 1, d);
  out.skeleton.row(0).setZero();
  Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(d);
  int done = 0;
  for (int i = 1; i <= n; ++i) {
    int qi = std::min(scheme.q_index(i), scheme.q);
    while (done < qi) {
      acc += out.sums.row(done);
      ++done;
    }
    out.skeleton.row(i) = acc;
  }
  return out;
}

double lambda_star_estimate(const ProcessSpec& spec, int l, int reps, std::uint64_t seed) {
  if (l < 32) throw ConfigError("lambda_star_estimate: window must be >= 32");
  if (reps < 8) throw ConfigError("lambda_star_estimate: need at least 8 replications");
  spec.validate();
  const int probes = 4;
  const int n = probes * l;
  const int d = spec.dim();
  std::vector<Eigen::MatrixXd> incr(static_cast<std::size_t>(reps));
  parallel_for(reps, [&](int rep) {
    SamplePath path = simulate(spec, n, seed_stream(seed, static_cast<std::uint64_t>(rep)));
    Eigen::MatrixXd rows(probes, d);
    for (int t = 0; t < probes; ++t)
      rows.row(t) = path.partial_sums.row((t + 1) * l) - path.partial_sums.row(t * l);
    incr[static_cast<std::size_t>(rep)] = std::move(rows);
  });
  double lo = std::numeric_limits<double>::infinity();
  for (int t = 0; t < probes; ++t) {
    Eigen::MatrixXd x(reps, d);
    for (int rep = 0; rep < reps; ++rep) x.row(rep) = incr[static_cast<std::size_t>(rep)].row(t);
    Eigen::RowVectorXd mean = x.colwise().mean();
    Eigen::MatrixXd centered = x.rowwise() - mean;
    Eigen::MatrixXd var = centered.transpose() * centered / static_cast<double>(reps - 1);
    lo = std::min(lo, min_eigenvalue(var) / static_cast<double>(l));
  }
  return lo;
}

DefinitizeResult positive_definitize(const Eigen::MatrixXd& v, int m, double delta_star) {
  if (!is_symmetric(v)) throw ConfigError("positive_definitize: matrix not symmetric");
  if (!(delta_star > 0)) throw ConfigError("positive_definitize: delta_star must be positive");
  DefinitizeResult out;
  double floor = delta_star * static_cast<double>(m);
  if (min_eigenvalue(v) >= floor) {
    out.v = v;
    out.replaced = false;
  } else {
    out.v = floor * Eigen::MatrixXd::Identity(v.rows(), v.cols());
    out.replaced = true;
  }
  return out;
}

namespace {

BlockCovariances definitize_all(std::vector<Eigen::MatrixXd> raw, const BlockingScheme& scheme,
                                double lambda_star_hat) {
  BlockCovariances out;
  out.lambda_star_hat = lambda_star_hat;
  out.delta_star = lambda_star_hat / 2.0;  // strictly inside (0, lambda_star)
  out.v.reserve(raw.size());
  out.v_sqrt.reserve(raw.size());
  out.replaced.reserve(raw.size());
  for (auto& v : raw) {
    DefinitizeResult r = positive_definitize((v + v.transpose()) / 2.0, scheme.m, out.delta_star);
    out.replaced.push_back(r.replaced);
    out.v_sqrt.push_back(psd_sqrt(r.v));
    out.v.push_back(std::move(r.v));
  }
  return out;
}

}  // namespace

BlockCovariances estimate_block_covs(const ProcessSpec& spec, const BlockingScheme& scheme,
                                     int reps, std::uint64_t seed, double lambda_star_hat,
                                     const MDepOptions& opts) {
  if (reps < 8) throw ConfigError("estimate_block_covs: need at least 8 replications");
  if (!(lambda_star_hat > 0))
    throw ConfigError("estimate_block_covs: variance floor lambda_star <= 0");
  spec.validate();
  const int d = spec.dim();
  const int burn = spec.burn();
  std::vector<Eigen::MatrixXd> block(static_cast<std::size_t>(reps));
  parallel_for(reps, [&](int rep) {
    auto rng = make_engine(seed_stream(seed, static_cast<std::uint64_t>(rep)));
    Eigen::MatrixXd eps = spec.innovation.sample(burn + scheme.n, rng);
    Eigen::MatrixXd mdep = m_dependent_values(spec, eps, burn, scheme, opts);
    block[static_cast<std::size_t>(rep)] = block_sums(mdep, scheme).sums;
  });
  std::vector<Eigen::MatrixXd> raw(static_cast<std::size_t>(scheme.q),
                                   Eigen::MatrixXd::Zero(d, d));
  for (int rep = 0; rep < reps; ++rep)
    for (int j = 0; j < scheme.q; ++j) {
      const Eigen::RowVectorXd a = block[static_cast<std::size_t>(rep)].row(j);
      raw[static_cast<std::size_t>(j)].noalias() += a.transpose() * a;
    }
  for (auto& v : raw) v /= static_cast<double>(reps);
  return definitize_all(std::move(raw), scheme, lambda_star_hat);
}

BlockCovariances raw_block_covs(const ProcessSpec& spec, const BlockingScheme& scheme,
                                int reps, std::uint64_t seed, double lambda_star_hat) {
  if (reps < 8) throw ConfigError("raw_block_covs: need at least 8 replications");
  if (!(lambda_star_hat > 0))
    throw ConfigError("raw_block_covs: variance floor lambda_star <= 0");
  spec.validate();
  const int d = spec.dim();
  std::vector<Eigen::MatrixXd> block(static_cast<std::size_t>(reps));
  parallel_for(reps, [&](int rep) {
    SamplePath path = simulate(spec, scheme.n, seed_stream(seed, static_cast<std::uint64_t>(rep)));
    block[static_cast<std::size_t>(rep)] =
        block_sums(path.values.leftCols(d), scheme).sums;
  });
  std::vector<Eigen::MatrixXd> raw(static_cast<std::size_t>(scheme.q),
                                   Eigen::MatrixXd::Zero(d, d));
  for (int rep = 0; rep < reps; ++rep)
    for (int j = 0; j < scheme.q; ++j) {
      const Eigen::RowVectorXd a = block[static_cast<std::size_t>(rep)].row(j);
      raw[static_cast<std::size_t>(j)].noalias() += a.transpose() * a;
    }
  for (auto& v : raw) v /= static_cast<double>(reps);
  return definitize_all(std::move(raw), scheme, lambda_star_hat);
}

BlockCovariances exact_block_covs(const Eigen::MatrixXd& longrun_cov,
                                  const BlockingScheme& scheme, double lambda_star_hat) {
  std::vector<Eigen::MatrixXd> raw(static_cast<std::size_t>(scheme.q),
                                   static_cast<double>(scheme.block_len) * longrun_cov);
  return definitize_all(std::move(raw), scheme, lambda_star_hat);
}

SamplePath gaussian_surrogate(const BlockCovariances& covs, const BlockingScheme& scheme,
                              std::uint64_t seed) {
  if (static_cast<int>(covs.v_sqrt.size()) != scheme.q)
    throw ConfigError("gaussian_surrogate: covariance count does not match scheme blocks");
  const int d = covs.v_sqrt.empty() ? 0 : static_cast<int>(covs.v_sqrt[0].rows());
  Eigen::MatrixXd values = Eigen::MatrixXd::Zero(scheme.n, d);
  auto rng = make_engine(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXd z(d);
  for (int j = 0; j < scheme.q; ++j) {
    for (int c = 0; c < d; ++c) z(c) = g(rng);
    values.row((j + 1) * scheme.block_len - 1) =
        (covs.v_sqrt[static_cast<std::size_t>(j)] * z).transpose();
  }
  return SamplePath::from_values(std::move(values));
}

CouplingReport coupling_report(const ProcessSpec& spec, const BlockingScheme& scheme,
                               std::uint64_t seed, const MDepOptions& opts) {
  spec.validate();
  const int burn = spec.burn();
  auto rng = make_engine(seed);
  Eigen::MatrixXd eps = spec.innovation.sample(burn + scheme.n, rng);
  PreparedPaths paths = prepare_paths(spec, eps, burn, scheme, opts);

  const int n = scheme.n, d = static_cast<int>(paths.raw.cols());
  Eigen::RowVectorXd s = Eigen::RowVectorXd::Zero(d);
  Eigen::RowVectorXd st = s, sm = s;
  BlockSums skel = block_sums(paths.mdep, scheme);

  CouplingReport rep;
  rep.n = n;
  rep.seed = seed;
  for (int i = 1; i <= n; ++i) {
    s += paths.raw.row(i - 1);
    st += paths.truncated.row(i - 1);
    sm += paths.mdep.row(i - 1);
    rep.stage1 = std::max(rep.stage1, (s - st).norm());
    rep.stage2 = std::max(rep.stage2, (st - sm).norm());
    rep.stage3 = std::max(rep.stage3, (sm - skel.skeleton.row(i)).norm());
    rep.total = std::max(rep.total, (s - skel.skeleton.row(i)).norm());
  }
  return rep;
}

double distributional_gap(const ProcessSpec& spec, const BlockingScheme& scheme,
                          const BlockCovariances& covs, GapFunctional functional,
                          int reps, std::uint64_t seed) {
  if (reps < 500) throw ConfigError("distributional_gap: need at least 500 replications");
  spec.validate();
  auto stat = [&](const SamplePath& path) {
    double v = 0;
    if (functional == GapFunctional::MaxNorm) {
      for (int i = 1; i <= path.n; ++i) v = std::max(v, path.partial_sums.row(i).norm());
    } else {
      v = path.partial_sums.row(path.n).norm();
    }
    return v / std::sqrt(static_cast<double>(path.n));
  };
  // The limiting Gaussian process spreads each block covariance over the
  // block's time points as independent per-step increments; the block-end
  // skeleton alone would understate within-block excursions of the max.
  const int d = static_cast<int>(covs.v_sqrt.empty() ? 1 : covs.v_sqrt.front().rows());
  const int skip = spec.burn() * spec.innovation_dim();
  auto gaussian_path = [&](std::uint64_t s) {
    auto rng = make_engine(s);
    std::normal_distribution<double> normal(0.0, 1.0);
    // Common random numbers: discard the burn-in draws so the Gaussian
    // increments align with the kept innovations of the data path seeded
    // from the same stream, shrinking the KS comparison noise.
    for (int i = 0; i < skip; ++i) normal(rng);
    const double scale = 1.0 / std::sqrt(static_cast<double>(scheme.block_len));
    Eigen::MatrixXd values = Eigen::MatrixXd::Zero(scheme.n, d);
    Eigen::VectorXd z(d);
    // Times past the last complete block continue at the final block's
    // local variance; freezing the path there would leave a tail mismatch
    // that does not shrink with n.
    for (int i = 0; i < scheme.n; ++i) {
      int j = std::min(i / scheme.block_len, scheme.q - 1);
      for (int c = 0; c < d; ++c) z(c) = normal(rng);
      values.row(i) = (covs.v_sqrt[static_cast<std::size_t>(j)] * z).transpose() * scale;
    }
    return SamplePath::from_values(std::move(values));
  };
  std::vector<double> a(static_cast<std::size_t>(reps)), b(static_cast<std::size_t>(reps));
  parallel_for(reps, [&](int rep) {
    std::uint64_t s = seed_stream(seed, static_cast<std::uint64_t>(rep));
    a[static_cast<std::size_t>(rep)] = stat(simulate(spec, scheme.n, s));
    b[static_cast<std::size_t>(rep)] = stat(gaussian_path(s));
  });
  return ks_distance(std::move(a), std::move(b));
}

double truncated_delta_bound(double delta_jp, int n, double p, double gamma, double t_n) {
  if (!(gamma > p)) throw ConfigError("truncated_delta_bound: requires gamma > p");
  if (delta_jp < 0) throw ConfigError("truncated_delta_bound: negative delta");
  return 2.0 * std::pow(static_cast<double>(n), 1.0 / p - 1.0 / gamma) *
         std::pow(t_n, 1.0 - p / gamma) * std::pow(delta_jp, p / gamma);
}

TruncatedDelta truncated_mdep_delta(const ProcessSpec& spec, const BlockingScheme& scheme,
                                    int j, double gamma, int reps, std::uint64_t seed,
                                    const MDepOptions& opts) {
  if (j < 0) throw ConfigError("truncated_mdep_delta: negative lag");
  spec.validate();
  auto proc = make_process(spec);
  const int d = proc->dim();
  const int burn = spec.burn();
  const int probes = 16;
  const int total = burn + probes;
  const double b = scheme.trunc_level;
  const int m = scheme.m;
  const double du = 1.0 / static_cast<double>(scheme.n);
  const double u0 = (1.0 - static_cast<double>(burn)) * du;

  // One fixed window function (same ghosts) evaluated on coupled inputs.
  GhostEnsemble ghosts(spec, *proc, total, u0, du, opts);
  const int R = opts.resamples;

  Eigen::MatrixXd samples(reps, probes);
  parallel_for(reps, [&](int rep) {
    auto rng = make_engine(seed_stream(seed, static_cast<std::uint64_t>(rep)));
    Eigen::MatrixXd eps = spec.innovation.sample(total + 1, rng);
    const Eigen::RowVectorXd fresh = eps.row(total);
    std::vector<Eigen::MatrixXd> se = ghosts.eps;
    std::vector<Eigen::MatrixXd> sp = ghosts.path;
    auto mdep_at = [&](int t) {
      int t0 = std::max(t - m, 0);
      int w = t - t0 + 1;
      Eigen::VectorXd acc = Eigen::VectorXd::Zero(d);
      for (int g = 0; g < R; ++g) {
        se[static_cast<std::size_t>(g)].middleRows(t0, w) = eps.middleRows(t0, w);
        proc->run(se[static_cast<std::size_t>(g)], sp[static_cast<std::size_t>(g)], t0, t + 1, u0, du);
        acc += truncate_vec(sp[static_cast<std::size_t>(g)].row(t).head(d).transpose(), b);
        se[static_cast<std::size_t>(g)].middleRows(t0, w) =
            ghosts.eps[static_cast<std::size_t>(g)].middleRows(t0, w);
        sp[static_cast<std::size_t>(g)].middleRows(t0, w) =
            ghosts.path[static_cast<std::size_t>(g)].middleRows(t0, w);
      }
      return Eigen::VectorXd(acc / static_cast<double>(R));
    };
    for (int k = 0; k < probes; ++k) {
      int t = burn + k;
      Eigen::VectorXd base = mdep_at(t);
      Eigen::RowVectorXd saved = eps.row(t - j);
      eps.row(t - j) = fresh;
      Eigen::VectorXd coupled = mdep_at(t);
      eps.row(t - j) = saved;
      samples(rep, k) = std::pow((base - coupled).norm(), gamma);
    }
  });

  TruncatedDelta out;
  double best_mean = 0, best_se2 = 0;
  for (int k = 0; k < probes; ++k) {
    double mean = samples.col(k).mean();
    if (mean >= best_mean) {
      best_mean = mean;
      best_se2 = (samples.col(k).array() - mean).square().sum() /
                 (static_cast<double>(reps - 1) * reps);
    }
  }
  if (best_mean <= 0) return out;
  out.value = std::pow(best_mean, 1.0 / gamma);
  out.std_error = std::sqrt(best_se2) / gamma * std::pow(best_mean, 1.0 / gamma - 1.0);
  return out;
}

}  // namespace tsg::gauss
