#include "tsg/harness.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tsg/dependence.hpp"
#include "tsg/rates.hpp"
#include "tsg/report.hpp"
#include "tsg/util.hpp"

namespace tsg::harness {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config field '" + key + "': expected a number, got '" + v + "'");
  }
}

}  // namespace

std::string Config::require(const std::string& key) const {
  auto it = kv.find(key);
  if (it == kv.end()) throw ConfigError("missing required config field '" + key + "'");
  return it->second;
}

std::string Config::get_or(const std::string& key, const std::string& fallback) const {
  auto it = kv.find(key);
  return it == kv.end() ? fallback : it->second;
}

double Config::require_double(const std::string& key) const {
  return to_double(key, require(key));
}

double Config::get_or_double(const std::string& key, double fallback) const {
  auto it = kv.find(key);
  return it == kv.end() ? fallback : to_double(key, it->second);
}

long long Config::get_or_int(const std::string& key, long long fallback) const {
  double v = get_or_double(key, static_cast<double>(fallback));
  auto iv = static_cast<long long>(v);
  if (static_cast<double>(iv) != v)
    throw ConfigError("config field '" + key + "': expected an integer");
  return iv;
}

std::uint64_t Config::get_or_u64(const std::string& key, std::uint64_t fallback) const {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  try {
    return std::stoull(it->second);
  } catch (const std::exception&) {
    throw ConfigError("config field '" + key + "': expected an unsigned integer");
  }
}

std::vector<double> Config::require_list(const std::string& key) const {
  std::vector<double> out;
  for (const auto& tok : split(require(key), ','))
    if (!tok.empty()) out.push_back(to_double(key, tok));
  if (out.empty()) throw ConfigError("config field '" + key + "': empty list");
  return out;
}

Config parse_config_text(const std::string& text, const std::string& name) {
  Config cfg;
  cfg.source = name;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(name + ":" + std::to_string(lineno) + ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(name + ":" + std::to_string(lineno) + ": empty key");
    cfg.kv[key] = val;
  }
  return cfg;
}

Config parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return parse_config_text(s.str(), path);
}

namespace {

CoefficientCurve parse_curve(const std::string& key, const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos) return CoefficientCurve::constant(to_double(key, text));
  std::string kind = trim(text.substr(0, colon));
  auto args = split(text.substr(colon + 1), ',');
  if (kind == "const" && args.size() == 1)
    return CoefficientCurve::constant(to_double(key, args[0]));
  if (kind == "linear" && args.size() == 2)
    return CoefficientCurve::linear(to_double(key, args[0]), to_double(key, args[1]));
  throw ConfigError("config field '" + key + "': expected 'const:c' or 'linear:a,b'");
}

InnovationLaw parse_innovation(const Config& cfg, const std::string& prefix, int d) {
  std::string family = cfg.get_or(prefix + "family", "gaussian");
  InnovationLaw law;
  if (family == "gaussian") {
    law = InnovationLaw::gaussian(d);
  } else if (family == "student_t") {
    law = InnovationLaw::student_t(d, cfg.get_or_double(prefix + "dof", 6.0));
  } else if (family == "uniform") {
    law = InnovationLaw::scaled_uniform(d);
  } else {
    throw ConfigError("config field '" + prefix + "family': unknown family '" + family + "'");
  }
  double sd = cfg.get_or_double(prefix + "sd", 1.0);
  if (!(sd > 0)) throw ConfigError("config field '" + prefix + "sd': must be positive");
  law.sigma *= sd * sd;
  return law;
}

}  // namespace

ProcessSpec parse_process(const Config& cfg, const std::string& prefix) {
  std::string kind = cfg.get_or(prefix + "kind", "varma");
  ProcessSpec spec;
  if (kind == "varma") {
    spec.kind = ProcessKind::Varma;
    int d = 1;
    if (cfg.has(prefix + "diag_ar")) {
      auto diag = cfg.require_list(prefix + "diag_ar");
      d = static_cast<int>(diag.size());
      Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
      for (int i = 0; i < d; ++i) a(i, i) = diag[static_cast<std::size_t>(i)];
      spec.ar_coeffs.push_back(std::move(a));
    } else if (cfg.has(prefix + "ar")) {
      for (double phi : cfg.require_list(prefix + "ar"))
        spec.ar_coeffs.push_back(Eigen::MatrixXd::Constant(1, 1, phi));
    }
    if (cfg.has(prefix + "ma")) {
      if (d != 1) throw ConfigError("config: scalar 'ma' list requires a scalar process");
      for (double c : cfg.require_list(prefix + "ma"))
        spec.varma_ma_coeffs.push_back(Eigen::MatrixXd::Constant(1, 1, c));
    }
    spec.innovation = parse_innovation(cfg, prefix + "innovation.", d);
  } else if (kind == "vector_linear") {
    spec.kind = ProcessKind::VectorLinear;
    for (double c : cfg.require_list(prefix + "coeffs"))
      spec.ma_coeffs.push_back(Eigen::MatrixXd::Constant(1, 1, c));
    spec.innovation = parse_innovation(cfg, prefix + "innovation.", 1);
  } else if (kind == "tvtar") {
    spec.kind = ProcessKind::TvTar;
    spec.theta1 = parse_curve(prefix + "theta1", cfg.require(prefix + "theta1"));
    spec.theta2 = parse_curve(prefix + "theta2", cfg.require(prefix + "theta2"));
    spec.innovation = parse_innovation(cfg, prefix + "innovation.", 1);
  } else if (kind == "covariance_of") {
    ProcessSpec base = parse_process(cfg, prefix + "base.");
    spec = ProcessSpec::covariance_of(std::move(base));
  } else {
    throw ConfigError("config field '" + prefix + "kind': unknown process kind '" + kind + "'");
  }
  long long burn = cfg.get_or_int(prefix + "burn_in", -1);
  spec.burn_in = static_cast<int>(burn);
  spec.validate();
  return spec;
}

ExperimentConfig parse_experiment(const Config& cfg) {
  ExperimentConfig ec;
  ec.raw = cfg;
  std::string kind = cfg.require("experiment");
  if (kind == "RateCurves") ec.experiment = ExperimentKind::RateCurves;
  else if (kind == "DependenceProfile") ec.experiment = ExperimentKind::DependenceProfile;
  else if (kind == "CouplingRate") ec.experiment = ExperimentKind::CouplingRate;
  else if (kind == "SurrogateGap") ec.experiment = ExperimentKind::SurrogateGap;
  else if (kind == "BandCoverage") ec.experiment = ExperimentKind::BandCoverage;
  else if (kind == "ChangePoint") ec.experiment = ExperimentKind::ChangePoint;
  else throw ConfigError("config field 'experiment': unknown experiment '" + kind + "'");

  ec.output_dir = cfg.get_or("output_dir", "out");
  ec.master_seed = cfg.get_or_u64("master_seed", 20260826ull);
  ec.reps = static_cast<int>(cfg.get_or_int("reps", 200));
  if (ec.reps < 1) throw ConfigError("config field 'reps': must be >= 1");
  ec.p = cfg.get_or_double("moment.p", 4.0);
  ec.chi = cfg.get_or_double("moment.chi", 0.5);
  ec.a_log = cfg.get_or_double("moment.a", 4.0);

  bool needs_grid = ec.experiment == ExperimentKind::CouplingRate ||
                    ec.experiment == ExperimentKind::SurrogateGap ||
                    ec.experiment == ExperimentKind::BandCoverage ||
                    ec.experiment == ExperimentKind::ChangePoint;
  if (needs_grid) {
    for (double v : cfg.require_list("n_grid")) {
      int n = static_cast<int>(v);
      if (static_cast<double>(n) != v || n < 1)
        throw ConfigError("config field 'n_grid': entries must be positive integers");
      ec.n_grid.push_back(n);
    }
    for (std::size_t i = 1; i < ec.n_grid.size(); ++i)
      if (ec.n_grid[i] <= ec.n_grid[i - 1])
        throw ConfigError("config field 'n_grid': must be strictly increasing");
  }
  if (ec.experiment != ExperimentKind::RateCurves &&
      ec.experiment != ExperimentKind::BandCoverage) {
    ec.process = parse_process(cfg, "process.");
    ec.has_process = true;
  }
  return ec;
}

// ------------------------------------------------------------------ drivers

SchemeInputs estimate_scheme_inputs(const ProcessSpec& spec, std::uint64_t seed, int max_lag,
                                    int delta_reps, int history, int lambda_window,
                                    int lambda_reps) {
  SchemeInputs out;
  dep::DependenceProfile profile =
      dep::mc_profile(spec, 2.0, max_lag, delta_reps, history, seed_stream(seed, 1));
  try {
    out.theta02 = dep::theta_tail(profile, 0, dep::TailModel::Geometric);
  } catch (const ConfigError&) {
    out.theta02 = dep::theta_tail(profile, 0, dep::TailModel::None);
  }
  out.lambda_star = gauss::lambda_star_estimate(spec, lambda_window, lambda_reps,
                                                seed_stream(seed, 2));
  return out;
}

namespace {

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i]; sy += y[i]; sxx += x[i] * x[i]; sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

CouplingStudy coupling_study(const ProcessSpec& spec, double p, double chi, double a_log,
                             const std::vector<int>& n_grid, int reps, std::uint64_t seed,
                             const gauss::MDepOptions& opts) {
  if (n_grid.empty()) throw ConfigError("coupling_study: empty n grid");
  SchemeInputs in = estimate_scheme_inputs(spec, splitmix64(seed));
  CouplingStudy study;
  study.n_grid = n_grid;
  for (std::size_t k = 0; k < n_grid.size(); ++k) {
    gauss::BlockingScheme scheme =
        gauss::make_scheme(n_grid[k], p, chi, a_log, in.theta02, in.lambda_star);
    std::vector<gauss::CouplingReport> reports(static_cast<std::size_t>(reps));
    parallel_for(reps, [&](int rep) {
      std::uint64_t s = seed_stream(seed, static_cast<std::uint64_t>(k) * 1000003ull +
                                              static_cast<std::uint64_t>(rep));
      reports[static_cast<std::size_t>(rep)] = gauss::coupling_report(spec, scheme, s, opts);
    });
    std::vector<double> totals;
    totals.reserve(reports.size());
    for (const auto& r : reports) totals.push_back(r.total);
    study.median_total.push_back(median(totals));
    study.schemes.push_back(scheme);
    study.reports.push_back(std::move(reports));
  }
  if (n_grid.size() >= 2) {
    std::vector<double> lx, ly;
    for (std::size_t k = 0; k < n_grid.size(); ++k) {
      lx.push_back(std::log(static_cast<double>(n_grid[k])));
      ly.push_back(std::log(study.median_total[k]));
    }
    study.slope = ols_slope(lx, ly);
  }
  return study;
}

GapStudy gap_study(const ProcessSpec& spec, double p, double chi, double a_log,
                   const std::vector<int>& n_grid, int reps, std::uint64_t seed,
                   gauss::GapFunctional functional, int cov_reps,
                   const gauss::MDepOptions& opts) {
  if (n_grid.empty()) throw ConfigError("gap_study: empty n grid");
  SchemeInputs in = estimate_scheme_inputs(spec, splitmix64(seed));
  // For linear kinds the long-run covariance has a closed form, so the
  // surrogate can use exact block covariances; Monte-Carlo covariance
  // noise is independent of n and would otherwise mask the trend in the
  // gap ladder.
  bool linear = spec.kind == ProcessKind::Varma || spec.kind == ProcessKind::VectorLinear;
  Eigen::MatrixXd longrun;
  if (linear) {
    if (spec.kind == ProcessKind::Varma) {
      longrun = longrun_cov_varma(spec);
    } else {
      Eigen::MatrixXd bsum = Eigen::MatrixXd::Zero(spec.dim(), spec.innovation_dim());
      for (const auto& b : spec.ma_coeffs) bsum += b;
      longrun = bsum * spec.innovation.sigma * bsum.transpose();
    }
  }
  GapStudy study;
  study.n_grid = n_grid;
  for (std::size_t k = 0; k < n_grid.size(); ++k) {
    gauss::BlockingScheme scheme =
        gauss::make_scheme(n_grid[k], p, chi, a_log, in.theta02, in.lambda_star);
    gauss::BlockCovariances covs =
        linear ? gauss::exact_block_covs(longrun, scheme, in.lambda_star)
               : gauss::estimate_block_covs(spec, scheme, cov_reps,
                                            seed_stream(seed, 777 + k), in.lambda_star, opts);
    study.ks.push_back(gauss::distributional_gap(spec, scheme, covs, functional, reps,
                                                 seed_stream(seed, 888 + k)));
  }
  return study;
}

BandStudy band_coverage_study(const CoefficientCurve& theta1, const CoefficientCurve& theta2,
                              const InnovationLaw& law, int n, double beta, double level,
                              int reps, int surrogate_reps, std::uint64_t seed) {
  ProcessSpec tv = ProcessSpec::tvtar(theta1, theta2, law);
  ProcessSpec score = tv;
  score.kind = ProcessKind::TvTarScore;
  score.validate();

  infer::KernelSpec kernel;
  kernel.bandwidth = std::pow(static_cast<double>(n), -beta);
  std::vector<double> grid = infer::default_grid(kernel.bandwidth);

  // Score-process blocking: geometric dependence decay, so any sub-critical
  // chi is a valid upper bound.  p = 8 with chi = 3 is the only admissible
  // plan at moderate n (the score's tail norm forces a long minimal block),
  // giving ten complete blocks.  At that scale the truncation level and the
  // short conditional-expectation window understate the score's variance,
  // so the surrogate is calibrated from raw block sums, which are the
  // quantity the band must actually cover.
  SchemeInputs in = estimate_scheme_inputs(score, splitmix64(seed + 3));
  gauss::BlockingScheme scheme = gauss::make_scheme(n, 8.0, 3.0, 4.0, in.theta02, in.lambda_star);
  gauss::BlockCovariances covs = gauss::raw_block_covs(score, scheme, 512,
                                                       seed_stream(seed, 4), in.lambda_star);

  BandStudy study;
  study.reps = reps;
  std::vector<int> covered(static_cast<std::size_t>(reps), 0);
  std::vector<infer::BandResult> first(1);
  parallel_for(reps, [&](int rep) {
    SamplePath path = simulate(tv, n, seed_stream(seed, 5000 + static_cast<std::uint64_t>(rep)));
    try {
      infer::BandResult fit = infer::fit_tvtar(path, kernel, grid);
      fit = infer::simultaneous_band(std::move(fit), covs, scheme, kernel, level,
                                     surrogate_reps,
                                     seed_stream(seed, 900000 + static_cast<std::uint64_t>(rep)));
      bool ok = true;
      for (std::size_t g = 0; g < grid.size(); ++g) {
        double t = grid[g];
        if (std::abs(fit.theta_hat(static_cast<int>(g), 0) - theta1(t)) > fit.half_width ||
            std::abs(fit.theta_hat(static_cast<int>(g), 1) - theta2(t)) > fit.half_width) {
          ok = false;
          break;
        }
      }
      covered[static_cast<std::size_t>(rep)] = ok ? 1 : 0;
      if (rep == 0) first[0] = std::move(fit);
    } catch (const ConfigError&) {
      // Singular local design in a replication counts as a miss.
      covered[static_cast<std::size_t>(rep)] = 0;
    }
  });
  int hits = 0;
  for (int c : covered) hits += c;
  study.coverage = static_cast<double>(hits) / reps;
  study.representative = std::move(first[0]);
  return study;
}

ChangePointStudy change_point_study(const ProcessSpec& base, int n, int reps,
                                    std::uint64_t seed, int surrogate_reps) {
  int lag = static_cast<int>(std::floor(std::cbrt(static_cast<double>(n))));
  ChangePointStudy study;
  std::vector<int> reject_null(static_cast<std::size_t>(reps), 0);
  std::vector<int> reject_alt(static_cast<std::size_t>(reps), 0);
  std::vector<infer::ChangePointStat> first(1);

  auto run_one = [&](int rep, bool doubled) {
    SamplePath x = simulate(base, n, seed_stream(seed, static_cast<std::uint64_t>(rep) +
                                                            (doubled ? 1u << 20 : 0u)));
    if (doubled) {
      // Covariance doubles at the midpoint: scale the path by sqrt(2).
      Eigen::MatrixXd v = x.values;
      v.bottomRows(n - n / 2) *= std::sqrt(2.0);
      x = SamplePath::from_values(std::move(v));
    }
    SamplePath w = covariance_process(x);
    Eigen::MatrixXd sigma = infer::longrun_cov_estimate(w, lag);
    infer::ChangePointStat st = infer::cusum_covariance(
        w, sigma, surrogate_reps, seed_stream(seed, 70000 + static_cast<std::uint64_t>(rep) +
                                                        (doubled ? 1u << 20 : 0u)));
    if (rep == 0 && !doubled) first[0] = st;
    return st.statistic > st.q95;
  };

  parallel_for(reps, [&](int rep) {
    reject_null[static_cast<std::size_t>(rep)] = run_one(rep, false) ? 1 : 0;
    reject_alt[static_cast<std::size_t>(rep)] = run_one(rep, true) ? 1 : 0;
  });
  int rn = 0, ra = 0;
  for (int v : reject_null) rn += v;
  for (int v : reject_alt) ra += v;
  study.size_rate = static_cast<double>(rn) / reps;
  study.power_rate = static_cast<double>(ra) / reps;
  study.representative = std::move(first[0]);
  return study;
}

// -------------------------------------------------------------- experiments

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

json scheme_json(const gauss::BlockingScheme& s) {
  json j;
  j["n"] = s.n;
  j["t_n"] = s.t_n;
  j["trunc_level"] = s.trunc_level;
  j["m"] = s.m;
  j["k0"] = s.k0;
  j["block_len"] = s.block_len;
  j["q"] = s.q;
  j["gamma"] = s.plan.gamma;
  j["cap_l"] = s.plan.cap_l;
  j["inv_r"] = s.plan.inv_r;
  j["regime"] = rates::regime_name(s.plan.regime);
  j["a_ok"] = s.plan.a_ok;
  return j;
}

void write_manifest(const ExperimentConfig& cfg, json derived, double wall_seconds) {
  json j;
  j["tool"] = "tsgauss";
  j["version"] = "0.1.0";
  j["experiment"] = cfg.raw.get_or("experiment", "");
  j["config"] = json(cfg.raw.kv);
  j["derived"] = std::move(derived);
  j["wall_clock_seconds"] = wall_seconds;
  report::write_text_file(join(cfg.output_dir, "manifest.json"), j.dump(2) + "\n");
}

void run_rate_curves(const ExperimentConfig& cfg, json& derived) {
  double p = cfg.raw.get_or_double("moment.p", cfg.p);
  double chi_max = cfg.raw.get_or_double("rates.chi_max", 2.0 * rates::chi0(p));
  int points = static_cast<int>(cfg.raw.get_or_int("rates.points", 64));
  if (points < 1) throw ConfigError("config field 'rates.points': must be >= 1");
  std::vector<std::string> rows;
  report::Series exp_s{"exponent", {}, {}}, gamma_s{"gamma", {}, {}}, l_s{"L", {}, {}};
  for (int i = 1; i <= points; ++i) {
    double chi = chi_max * i / points;
    rates::RatePoint rp = rates::evaluate(p, chi);
    rows.push_back(report::num(chi) + "," + report::num(rp.tau_exponent) + "," +
                   report::num(rp.gamma) + "," + report::num(rp.cap_l) + "," +
                   rates::regime_name(rp.regime));
    exp_s.x.push_back(chi); exp_s.y.push_back(rp.tau_exponent);
    gamma_s.x.push_back(chi); gamma_s.y.push_back(rp.gamma);
    l_s.x.push_back(chi); l_s.y.push_back(rp.cap_l);
  }
  report::write_csv(join(cfg.output_dir, "rates.csv"), "chi,exponent,gamma,L,regime", rows);
  report::write_line_svg(join(cfg.output_dir, "rate_exponent.svg"),
                         "Approximation exponent vs dependence decay", "chi", "exponent",
                         {exp_s});
  report::write_line_svg(join(cfg.output_dir, "gamma_and_L.svg"),
                         "Auxiliary exponents vs dependence decay", "chi", "value",
                         {gamma_s, l_s});
  derived["p"] = p;
  derived["chi0"] = rates::chi0(p);
}

void run_dependence_profile(const ExperimentConfig& cfg, json& derived) {
  double r = cfg.raw.get_or_double("dependence.r", 2.0);
  int max_lag = static_cast<int>(cfg.raw.get_or_int("dependence.max_lag", 16));
  int history = static_cast<int>(cfg.raw.get_or_int("dependence.history", 2048));
  dep::DependenceProfile profile =
      dep::mc_profile(cfg.process, r, max_lag, cfg.reps, history, cfg.master_seed);
  std::vector<std::string> rows;
  report::Series ds{"delta", {}, {}};
  for (std::size_t j = 0; j < profile.deltas.size(); ++j) {
    rows.push_back(std::to_string(j) + "," + report::num(profile.deltas[j]) + "," +
                   report::num(profile.theta_tails[j]));
    ds.x.push_back(static_cast<double>(j));
    ds.y.push_back(profile.deltas[j]);
  }
  report::write_csv(join(cfg.output_dir, "profile.csv"), "lag,delta,theta_tail", rows);
  report::write_line_svg(join(cfg.output_dir, "dependence_decay.svg"),
                         "Coupling distance by lag", "lag", "delta", {ds}, false, true);
  derived["moment_order"] = r;
  derived["theta0"] = profile.theta_tails.empty() ? 0.0 : profile.theta_tails[0];
  if (max_lag >= 6) {
    try {
      dep::DecayFit fit = dep::fit_decay(profile, 3, max_lag);
      derived["fit"] = {{"chi_hat", fit.chi_hat},
                        {"a_hat", fit.a_hat},
                        {"rmse", fit.rmse},
                        {"range", {fit.lo, fit.hi}},
                        {"super_polynomial", fit.super_polynomial}};
    } catch (const ConfigError& e) {
      derived["fit_error"] = e.what();
    }
  }
}

void run_coupling_rate(const ExperimentConfig& cfg, json& derived) {
  CouplingStudy study = coupling_study(cfg.process, cfg.p, cfg.chi, cfg.a_log, cfg.n_grid,
                                       cfg.reps, cfg.master_seed);
  std::vector<std::string> rows;
  for (std::size_t k = 0; k < study.n_grid.size(); ++k)
    for (const auto& r : study.reports[k])
      rows.push_back(std::to_string(r.n) + "," + std::to_string(r.seed) + "," +
                     report::num(r.stage1) + "," + report::num(r.stage2) + "," +
                     report::num(r.stage3) + "," + report::num(r.total));
  report::write_csv(join(cfg.output_dir, "coupling.csv"),
                    "n,seed,stage1,stage2,stage3,total", rows);
  report::Series med{"median total", {}, {}};
  json per_n = json::array();
  for (std::size_t k = 0; k < study.n_grid.size(); ++k) {
    med.x.push_back(static_cast<double>(study.n_grid[k]));
    med.y.push_back(study.median_total[k]);
    json jn = scheme_json(study.schemes[k]);
    jn["median_total"] = study.median_total[k];
    per_n.push_back(std::move(jn));
  }
  report::write_line_svg(join(cfg.output_dir, "coupling_rate.svg"),
                         "Coupling error vs path length (log-log)", "n", "median max gap",
                         {med}, true, true);
  derived["per_n"] = std::move(per_n);
  derived["loglog_slope"] = study.slope;
}

void run_surrogate_gap(const ExperimentConfig& cfg, json& derived) {
  gauss::GapFunctional f = gauss::GapFunctional::MaxNorm;
  std::string fname = cfg.raw.get_or("gap.functional", "max");
  if (fname == "endpoint") f = gauss::GapFunctional::EndpointNorm;
  else if (fname != "max") throw ConfigError("config field 'gap.functional': 'max' or 'endpoint'");
  GapStudy study = gap_study(cfg.process, cfg.p, cfg.chi, cfg.a_log, cfg.n_grid, cfg.reps,
                             cfg.master_seed, f);
  std::vector<std::string> rows;
  report::Series ks{"KS distance", {}, {}};
  for (std::size_t k = 0; k < study.n_grid.size(); ++k) {
    rows.push_back(std::to_string(study.n_grid[k]) + "," + report::num(study.ks[k]));
    ks.x.push_back(static_cast<double>(study.n_grid[k]));
    ks.y.push_back(study.ks[k]);
  }
  report::write_csv(join(cfg.output_dir, "gap.csv"), "n,ks", rows);
  report::write_line_svg(join(cfg.output_dir, "surrogate_gap.svg"),
                         "Surrogate distributional gap", "n", "KS distance", {ks}, true, false);
  derived["functional"] = fname;
}

void run_band_coverage(const ExperimentConfig& cfg, json& derived) {
  CoefficientCurve th1 = parse_curve("band.theta1", cfg.raw.get_or("band.theta1", "linear:0.3,0.2"));
  CoefficientCurve th2 = parse_curve("band.theta2", cfg.raw.get_or("band.theta2", "const:-0.2"));
  double beta = cfg.raw.get_or_double("band.beta", 0.6);
  double alpha = cfg.raw.get_or_double("band.alpha", 0.4);
  double level = cfg.raw.get_or_double("band.level", 0.95);
  int surrogate_reps = static_cast<int>(cfg.raw.get_or_int("band.surrogate_reps", 500));
  int n = cfg.n_grid.front();
  infer::BandwidthReport bw = infer::bandwidth_check(cfg.p, beta, alpha);
  if (!bw.admissible)
    throw ConfigError("band coverage: bandwidth exponent beta=" + std::to_string(beta) +
                      " is inadmissible for (p, alpha)");
  BandStudy study = band_coverage_study(th1, th2, InnovationLaw::gaussian(1), n, beta, level,
                                        cfg.reps, surrogate_reps, cfg.master_seed);
  std::vector<std::string> rows;
  const auto& fit = study.representative;
  for (std::size_t g = 0; g < fit.grid.size(); ++g)
    rows.push_back(report::num(fit.grid[g]) + "," +
                   report::num(fit.theta_hat(static_cast<int>(g), 0)) + "," +
                   report::num(fit.theta_hat(static_cast<int>(g), 1)) + "," +
                   report::num(fit.half_width));
  report::write_csv(join(cfg.output_dir, "band.csv"), "t,theta1_hat,theta2_hat,half_width",
                    rows);
  report::Series t1{"theta1_hat", fit.grid, {}}, t2{"theta2_hat", fit.grid, {}};
  for (std::size_t g = 0; g < fit.grid.size(); ++g) {
    t1.y.push_back(fit.theta_hat(static_cast<int>(g), 0));
    t2.y.push_back(fit.theta_hat(static_cast<int>(g), 1));
  }
  report::write_line_svg(join(cfg.output_dir, "band_fit.svg"),
                         "Time-varying coefficient estimates", "t", "theta", {t1, t2});
  derived["coverage"] = study.coverage;
  derived["half_width"] = fit.half_width;
  derived["bandwidth"] = std::pow(static_cast<double>(n), -beta);
  derived["e1"] = bw.e1;
  derived["e2"] = bw.e2;
}

void run_change_point(const ExperimentConfig& cfg, json& derived) {
  int n = cfg.n_grid.front();
  ChangePointStudy study = change_point_study(cfg.process, n, cfg.reps, cfg.master_seed);
  std::vector<std::string> rows;
  for (int i = 0; i < study.representative.cusum_path.size(); ++i)
    rows.push_back(std::to_string(i + 1) + "," + report::num(study.representative.cusum_path(i)));
  report::write_csv(join(cfg.output_dir, "cusum.csv"), "i,cusum", rows);
  derived["size_rate"] = study.size_rate;
  derived["power_rate"] = study.power_rate;
  derived["q95"] = study.representative.q95;
  derived["summary"] = "null rejection " + report::num(study.size_rate) +
                       ", doubled-covariance rejection " + report::num(study.power_rate) +
                       " at nominal level 0.05";
}

}  // namespace

void run_experiment(const ExperimentConfig& cfg) {
  auto start = std::chrono::steady_clock::now();
  fs::create_directories(cfg.output_dir);
  json derived;
  switch (cfg.experiment) {
    case ExperimentKind::RateCurves: run_rate_curves(cfg, derived); break;
    case ExperimentKind::DependenceProfile: run_dependence_profile(cfg, derived); break;
    case ExperimentKind::CouplingRate: run_coupling_rate(cfg, derived); break;
    case ExperimentKind::SurrogateGap: run_surrogate_gap(cfg, derived); break;
    case ExperimentKind::BandCoverage: run_band_coverage(cfg, derived); break;
    case ExperimentKind::ChangePoint: run_change_point(cfg, derived); break;
  }
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_manifest(cfg, std::move(derived), wall);
}

}  // namespace tsg::harness
