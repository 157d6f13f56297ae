#include <doctest.h>

#include <cmath>

#include "tsg/dependence.hpp"
#include "tsg/util.hpp"

using namespace tsg;
using namespace tsg::dep;

namespace {

std::vector<Eigen::MatrixXd> geometric_coeffs(double phi, int count) {
  std::vector<Eigen::MatrixXd> b;
  for (int j = 0; j < count; ++j) b.push_back(Eigen::MatrixXd::Constant(1, 1, std::pow(phi, j)));
  return b;
}

}  // namespace

TEST_CASE("analytic linear coupling distance: Gaussian closed form") {
  auto coeffs = geometric_coeffs(0.5, 12);
  auto law = InnovationLaw::gaussian(1);
  for (int j : {0, 1, 4})
    // ||B_j (e - e')||_2 = |phi^j| sqrt(2)
    CHECK(analytic_delta_linear(coeffs, law, 2.0, j) ==
          doctest::Approx(std::sqrt(2.0) * std::pow(0.5, j)).epsilon(1e-12));
  CHECK_THROWS(analytic_delta_linear(coeffs, law, 2.0, 20));
}

TEST_CASE("Monte Carlo coupling distance matches the AR(1) closed form") {
  auto spec = ProcessSpec::ar1(0.5, InnovationLaw::gaussian(1));
  for (int j : {0, 2}) {
    McDelta est = mc_delta(spec, j, 2.0, 20000, 128, 1234);
    double truth = std::sqrt(2.0) * std::pow(0.5, j);
    CHECK(std::abs(est.value - truth) <= 3.0 * est.std_error + 1e-3);
  }
}

TEST_CASE("finite-order moving average has exactly zero distance beyond its order") {
  auto spec = ProcessSpec::vector_linear(geometric_coeffs(0.5, 3), InnovationLaw::gaussian(1));
  McDelta est = mc_delta(spec, 5, 2.0, 200, 64, 9);
  CHECK(est.value == 0.0);
  CHECK(mc_delta(spec, 2, 2.0, 200, 64, 9).value > 0.0);
}

TEST_CASE("tail sums: exact accumulation and geometric extrapolation") {
  // deltas = 2 * 0.5^j for j = 0..6.
  std::vector<double> deltas;
  for (int j = 0; j <= 6; ++j) deltas.push_back(2.0 * std::pow(0.5, j));
  auto profile = DependenceProfile::from_deltas(2.0, deltas);
  // Stored part only (model None): Theta_2 = sum_{j=2..6} = 2*(0.25..0.015625).
  double stored = 0;
  for (int j = 2; j <= 6; ++j) stored += 2.0 * std::pow(0.5, j);
  CHECK(theta_tail(profile, 2, TailModel::None) == doctest::Approx(stored).epsilon(1e-12));
  // Geometric model recovers the full series sum_{j>=2} = 1.
  CHECK(theta_tail(profile, 2, TailModel::Geometric) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(theta_tail(profile, 0, TailModel::Geometric) == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("decay fit recovers planted (chi, A) from exact tail sums") {
  // Theta_i = i^{-chi} (log i)^{-A} exactly; recover by regression.
  const double chi = 1.3, a = 2.0;
  auto theta = [&](int i) { return std::pow(i, -chi) * std::pow(std::log(i), -a); };
  // Choose deltas so that theta_tails[i] = theta(i) exactly for i in [3, 40].
  std::vector<double> deltas(41, 0.0);
  for (int j = 3; j < 40; ++j) deltas[static_cast<std::size_t>(j)] = theta(j) - theta(j + 1);
  deltas[40] = theta(40);
  auto profile = DependenceProfile::from_deltas(2.0, deltas);
  for (int i : {3, 10, 40})
    CHECK(profile.theta_tails[static_cast<std::size_t>(i)] ==
          doctest::Approx(theta(i)).epsilon(1e-12));
  DecayFit fit = fit_decay(profile, 3, 40);
  CHECK(fit.chi_hat == doctest::Approx(chi).epsilon(1e-6));
  CHECK(fit.a_hat == doctest::Approx(a).epsilon(1e-6));
  CHECK(fit.rmse < 1e-9);
}

TEST_CASE("quadratic process distance uses the product bound") {
  CHECK(covariance_process_delta(3.0, 0.25, 6.0) == doctest::Approx(2.0 * 3.0 * 0.25));
  CHECK_THROWS_AS(covariance_process_delta(3.0, 0.25, 4.0), ConfigError);
}

TEST_CASE("mc_profile assembles lags and tail sums consistently") {
  auto spec = ProcessSpec::ar1(0.5, InnovationLaw::gaussian(1));
  DependenceProfile profile = mc_profile(spec, 2.0, 5, 2000, 128, 77);
  REQUIRE(profile.deltas.size() == 6);
  double tail = 0;
  for (int j = 5; j >= 0; --j) {
    tail += profile.deltas[static_cast<std::size_t>(j)];
    CHECK(profile.theta_tails[static_cast<std::size_t>(j)] == doctest::Approx(tail));
  }
}
