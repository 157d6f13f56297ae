#include <doctest.h>

#include <cmath>

#include "tsg/rates.hpp"
#include "tsg/util.hpp"

using namespace tsg;
using namespace tsg::rates;

TEST_CASE("polynomial building block spot values") {
  // Independent expansions of the defining polynomials.
  CHECK(f1(4, 1) == doctest::Approx(32.0));           // p^2 chi^2 + p^2 chi
  CHECK(f2(4, 1) == doctest::Approx(18.0));           // 2 p chi^2 + 3 p chi - 2 chi
  CHECK(f4(4, 1) == doctest::Approx(176.0));          // 2p(2p chi^2 + 3p chi + p - 2)
  CHECK(f5(4, 1) == doctest::Approx(900.0));
}

TEST_CASE("closed forms solve the exponent system (numeric-solver oracle)") {
  // Frozen from an independent numeric root find of the three equations.
  struct Row { double p, chi, inv_r, gamma, cap_l; };
  const Row rows[] = {
      {4, 0.5, 0.309413115425505, 5.20782512765993, 0.38117376914899},
      {6, 1.0, 0.21541415316353, 9.78394586162666, 0.28458584683647},
      {3, 0.4, 0.356442627340713, 3.62215467497755, 0.358893431648217},
      {8, 1.5, 0.161961155796639, 15.7186799323832, 0.225359229468907},
  };
  for (const auto& row : rows) {
    CHECK(inv_r(row.p, row.chi) == doctest::Approx(row.inv_r).epsilon(1e-12));
    CHECK(gamma_exp(row.p, row.chi) == doctest::Approx(row.gamma).epsilon(1e-12));
    CHECK(cap_l(row.p, row.chi) == doctest::Approx(row.cap_l).epsilon(1e-12));
    SystemResiduals res = system_residuals(row.p, row.chi, inv_r(row.p, row.chi),
                                           gamma_exp(row.p, row.chi), cap_l(row.p, row.chi));
    CHECK(std::abs(res.eq1) < 1e-12);
    CHECK(std::abs(res.eq2) < 1e-12);
    CHECK(std::abs(res.eq3) < 1e-12);
  }
}

TEST_CASE("phase boundary values") {
  CHECK(chi0(4) == 1.0);  // exact rational point
  CHECK(chi0(6) == doctest::Approx(1.7207592200561266).epsilon(1e-14));
  CHECK(chi0(8) == doctest::Approx(2.3530939566132654).epsilon(1e-14));
}

TEST_CASE("limits of the solution branch") {
  // chi -> 0: the m-dependence window exponent L -> 1 and r -> 2.
  CHECK(cap_l(4, 1e-7) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(1.0 / inv_r(4, 1e-7) == doctest::Approx(2.0).epsilon(1e-4));
  // chi -> chi0: r -> p.
  for (double p : {3.0, 4.0, 6.0, 8.0})
    CHECK(1.0 / inv_r(p, chi0(p)) == doctest::Approx(p).epsilon(1e-9));
}

TEST_CASE("minimum log-decay power and its critical value") {
  for (double p : {4.0, 6.0}) {
    double chi = 0.7 * chi0(p);
    CHECK(a_lower_bound(p, chi) == doctest::Approx(2.0 * gamma_exp(p, chi) / p).epsilon(1e-13));
  }
  // Frozen closed-form values (p^2+8p+4+(p-2)sqrt(p^2+20p+4))/(6p).
  CHECK(a_lower_bound_critical(4) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(a_lower_bound_critical(8) == doctest::Approx(4.6374586088176875).epsilon(1e-12));
  CHECK(a_lower_bound_critical(3) == doctest::Approx(2.5302224302954186).epsilon(1e-12));
}

TEST_CASE("regime classification and saturation") {
  CHECK(classify(8, 1.0) == Regime::SubCritical);
  CHECK(classify(8, chi0(8)) == Regime::CriticalLargeP);
  CHECK(classify(3, chi0(3)) == Regime::CriticalSmallP);
  CHECK(classify(8, 3.0) == Regime::SuperCritical);
  RatePoint sub = evaluate(8, 1.0);
  CHECK(sub.tau_exponent == doctest::Approx(sub.inv_r));
  RatePoint super = evaluate(8, 3.0);
  CHECK(super.tau_exponent == doctest::Approx(1.0 / 8.0));
  // Saturated auxiliary exponents equal their boundary values.
  CHECK(super.gamma == doctest::Approx(gamma_exp(8, chi0(8))));
  CHECK(super.cap_l == doctest::Approx(cap_l(8, chi0(8))));
}

TEST_CASE("domain errors are ConfigError") {
  CHECK_THROWS_AS(evaluate(2.0, 0.5), ConfigError);
  CHECK_THROWS_AS(evaluate(4.0, 0.0), ConfigError);
  CHECK_THROWS_AS(evaluate(4.0, -1.0), ConfigError);
}

TEST_CASE("rate_table is ordered and spans the requested range") {
  auto tab = rate_table(4.0, 0.1, 2.0, 16);
  CHECK(tab.size() == 16);
  CHECK(tab.front().chi == doctest::Approx(0.1));
  CHECK(tab.back().chi == doctest::Approx(2.0));
  for (std::size_t i = 1; i < tab.size(); ++i) CHECK(tab[i].chi > tab[i - 1].chi);
}
