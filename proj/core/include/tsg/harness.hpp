#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tsg/construction.hpp"
#include "tsg/inference.hpp"
#include "tsg/process.hpp"

namespace tsg::harness {

// Flat key = value configuration with dotted section names.
struct Config {
  std::map<std::string, std::string> kv;
  std::string source;

  bool has(const std::string& key) const { return kv.count(key) > 0; }
  std::string require(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  double require_double(const std::string& key) const;
  double get_or_double(const std::string& key, double fallback) const;
  long long get_or_int(const std::string& key, long long fallback) const;
  std::uint64_t get_or_u64(const std::string& key, std::uint64_t fallback) const;
  std::vector<double> require_list(const std::string& key) const;
};

Config parse_config_text(const std::string& text, const std::string& name);
Config parse_config_file(const std::string& path);

enum class ExperimentKind {
  RateCurves,
  DependenceProfile,
  CouplingRate,
  SurrogateGap,
  BandCoverage,
  ChangePoint,
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::RateCurves;
  Config raw;
  bool has_process = false;
  ProcessSpec process;
  double p = 4, chi = 0.5, a_log = 4;
  std::vector<int> n_grid;
  int reps = 200;
  std::uint64_t master_seed = 1;
  std::string output_dir = "out";
};

// Builds a ProcessSpec from config keys under the given prefix
// ("process."); exposed for tests and nested (covariance-of) parsing.
ProcessSpec parse_process(const Config& cfg, const std::string& prefix);

ExperimentConfig parse_experiment(const Config& cfg);

// Runs the experiment and writes CSVs, SVG plots and a JSON run manifest
// into output_dir.  Throws ConfigError for input problems.
void run_experiment(const ExperimentConfig& cfg);

// ---- reusable experiment drivers (the CLI and the test suites share these)

// Dependence inputs the blocking scheme needs, estimated from the process:
// Theta_{0,2} with a geometric tail extrapolation, and the window-variance
// floor lambda_star.
struct SchemeInputs {
  double theta02 = 0;
  double lambda_star = 0;
};
SchemeInputs estimate_scheme_inputs(const ProcessSpec& spec, std::uint64_t seed,
                                    int max_lag = 12, int delta_reps = 2000,
                                    int history = 512, int lambda_window = 256,
                                    int lambda_reps = 200);

struct CouplingStudy {
  std::vector<int> n_grid;
  std::vector<gauss::BlockingScheme> schemes;              // per n
  std::vector<std::vector<gauss::CouplingReport>> reports; // per n, per rep
  std::vector<double> median_total;                        // per n
  double slope = 0;  // OLS slope of log median_total on log n
};
CouplingStudy coupling_study(const ProcessSpec& spec, double p, double chi, double a_log,
                             const std::vector<int>& n_grid, int reps, std::uint64_t seed,
                             const gauss::MDepOptions& opts = {});

struct GapStudy {
  std::vector<int> n_grid;
  std::vector<double> ks;  // per n
};
GapStudy gap_study(const ProcessSpec& spec, double p, double chi, double a_log,
                   const std::vector<int>& n_grid, int reps, std::uint64_t seed,
                   gauss::GapFunctional functional = gauss::GapFunctional::MaxNorm,
                   int cov_reps = 192, const gauss::MDepOptions& opts = {});

struct BandStudy {
  infer::BandResult representative;  // first replication's fit + band
  double coverage = 0;
  int reps = 0;
};
BandStudy band_coverage_study(const CoefficientCurve& theta1, const CoefficientCurve& theta2,
                              const InnovationLaw& law, int n, double beta, double level,
                              int reps, int surrogate_reps, std::uint64_t seed);

struct ChangePointStudy {
  double size_rate = 0;   // rejections at q95 under the null
  double power_rate = 0;  // rejections under midpoint covariance doubling
  infer::ChangePointStat representative;
};
ChangePointStudy change_point_study(const ProcessSpec& base, int n, int reps,
                                    std::uint64_t seed, int surrogate_reps = 400);

}  // namespace tsg::harness
