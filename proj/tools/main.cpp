// Command-line front end: run experiments from a config file, validate a
// config without running it, or print the rate-exponent table for a given
// moment order.
//
// Exit codes: 0 success, 1 configuration error, 2 runtime failure.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "tsg/harness.hpp"
#include "tsg/rates.hpp"
#include "tsg/report.hpp"
#include "tsg/util.hpp"

namespace {

int cmd_run(const std::string& config_path) {
  tsg::harness::ExperimentConfig cfg =
      tsg::harness::parse_experiment(tsg::harness::parse_config_file(config_path));
  tsg::harness::run_experiment(cfg);
  std::printf("wrote results to %s\n", cfg.output_dir.c_str());
  return 0;
}

int cmd_validate(const std::string& config_path) {
  tsg::harness::parse_experiment(tsg::harness::parse_config_file(config_path));
  std::printf("ok: %s\n", config_path.c_str());
  return 0;
}

int cmd_rates(double p, double chi_max, int points) {
  if (points < 1) throw tsg::ConfigError("--points must be >= 1");
  if (!(chi_max > 0)) throw tsg::ConfigError("--chi-max must be positive");
  std::printf("chi,exponent,gamma,L,regime\n");
  for (int i = 1; i <= points; ++i) {
    double chi = chi_max * i / points;
    tsg::rates::RatePoint rp = tsg::rates::evaluate(p, chi);
    std::printf("%s,%s,%s,%s,%s\n", tsg::report::num(chi).c_str(),
                tsg::report::num(rp.tau_exponent).c_str(), tsg::report::num(rp.gamma).c_str(),
                tsg::report::num(rp.cap_l).c_str(), tsg::rates::regime_name(rp.regime).c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian approximation toolkit for nonstationary time series"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "run an experiment described by a config file");
  run->add_option("config", config_path, "path to key = value config file")->required();

  auto* validate = app.add_subcommand("validate", "parse and check a config file");
  validate->add_option("config", config_path, "path to key = value config file")->required();

  double p = 4.0, chi_max = 0.0;
  int points = 64;
  auto* rates = app.add_subcommand("rates", "print the rate-exponent table as CSV");
  rates->add_option("--p", p, "moment order (> 2)")->required();
  rates->add_option("--chi-max", chi_max, "largest decay exponent to tabulate")->required();
  rates->add_option("--points", points, "number of grid points");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) return cmd_run(config_path);
    if (validate->parsed()) return cmd_validate(config_path);
    return cmd_rates(p, chi_max, points);
  } catch (const tsg::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
