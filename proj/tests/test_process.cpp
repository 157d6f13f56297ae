#include <doctest.h>

#include <cmath>

#include "tsg/process.hpp"
#include "tsg/util.hpp"

using namespace tsg;

TEST_CASE("simulate is deterministic in (spec, n, seed)") {
  auto spec = ProcessSpec::ar1(0.5, InnovationLaw::gaussian(1));
  SamplePath a = simulate(spec, 64, 42), b = simulate(spec, 64, 42);
  CHECK((a.values - b.values).norm() == 0.0);
  SamplePath c = simulate(spec, 64, 43);
  CHECK((a.values - c.values).norm() > 0.0);
}

TEST_CASE("partial sums telescope the values exactly") {
  auto spec = ProcessSpec::ar1(0.3, InnovationLaw::gaussian(1));
  SamplePath x = simulate(spec, 100, 7);
  CHECK(x.partial_sums.row(0).norm() == 0.0);
  Eigen::RowVectorXd s = Eigen::RowVectorXd::Zero(x.d);
  for (int i = 0; i < x.n; ++i) {
    s += x.values.row(i);
    CHECK((x.partial_sums.row(i + 1) - s).norm() <= 1e-12 * (1.0 + s.norm()));
  }
}

TEST_CASE("threshold AR with equal branches collapses to linear AR(1)") {
  auto law = InnovationLaw::gaussian(1);
  auto tv = ProcessSpec::tvtar(CoefficientCurve::constant(0.4),
                               CoefficientCurve::constant(0.4), law);
  auto ar = ProcessSpec::ar1(0.4, law);
  tv.burn_in = ar.burn();  // align the kept windows
  SamplePath a = simulate(tv, 200, 99), b = simulate(ar, 200, 99);
  CHECK((a.values - b.values).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("AR-to-MA inversion gives geometric coefficients") {
  auto spec = ProcessSpec::ar1(0.5, InnovationLaw::gaussian(1));
  auto b = varma_to_ma(spec, 10);
  REQUIRE(b.size() == 11);
  for (int j = 0; j <= 10; ++j)
    CHECK(b[static_cast<std::size_t>(j)](0, 0) == doctest::Approx(std::pow(0.5, j)).epsilon(1e-12));
}

TEST_CASE("long-run covariance closed form: scalar and diagonal vector case") {
  auto ar = ProcessSpec::ar1(0.5, InnovationLaw::gaussian(1));
  CHECK(longrun_cov_varma(ar)(0, 0) == doctest::Approx(4.0).epsilon(1e-12));
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
  a(0, 0) = 0.5;
  a(1, 1) = 0.2;
  auto var = ProcessSpec::varma({a}, {}, InnovationLaw::gaussian(2));
  Eigen::MatrixXd lr = longrun_cov_varma(var);
  CHECK(lr(0, 0) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(lr(1, 1) == doctest::Approx(1.0 / (0.8 * 0.8)).epsilon(1e-12));
  CHECK(lr(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("unstable recursions are rejected") {
  CHECK_THROWS_AS(ProcessSpec::ar1(1.01, InnovationLaw::gaussian(1)).validate(), ConfigError);
  auto tv = ProcessSpec::tvtar(CoefficientCurve::constant(0.7),
                               CoefficientCurve::constant(-0.4), InnovationLaw::gaussian(1));
  CHECK_THROWS_AS(tv.validate(), ConfigError);  // sup(|th1|+|th2|) = 1.1
}

TEST_CASE("standardized innovation laws have unit variance") {
  auto rng = make_engine(31);
  for (auto law : {InnovationLaw::student_t(1, 8.0), InnovationLaw::scaled_uniform(1)}) {
    Eigen::MatrixXd draws = law.sample(200000, rng);
    double var = draws.col(0).squaredNorm() / static_cast<double>(draws.rows());
    CHECK(var == doctest::Approx(1.0).epsilon(0.02));
  }
  // Uniform support is [-sqrt(3), sqrt(3)].
  auto u = InnovationLaw::scaled_uniform(1);
  Eigen::MatrixXd d = u.sample(100000, rng);
  CHECK(d.lpNorm<Eigen::Infinity>() <= std::sqrt(3.0) + 1e-12);
  CHECK_THROWS_AS(InnovationLaw::student_t(1, 4.0).validate(4.0), ConfigError);
}

TEST_CASE("covariance process has d(d+1)/2 columns of lexicographic products") {
  auto base = ProcessSpec::varma(
      {(Eigen::MatrixXd(2, 2) << 0.5, 0, 0, 0.2).finished()}, {}, InnovationLaw::gaussian(2));
  SamplePath x = simulate(base, 50, 5);
  SamplePath w = covariance_process(x);
  CHECK(w.d == 3);
  for (int i = 0; i < 50; ++i) {
    CHECK(w.values(i, 0) == doctest::Approx(x.values(i, 0) * x.values(i, 0)));
    CHECK(w.values(i, 1) == doctest::Approx(x.values(i, 0) * x.values(i, 1)));
    CHECK(w.values(i, 2) == doctest::Approx(x.values(i, 1) * x.values(i, 1)));
  }
  auto spec = ProcessSpec::covariance_of(base);
  CHECK(spec.dim() == 3);
  SamplePath w2 = simulate(spec, 50, 5);
  CHECK((w2.values - w.values).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("contraction coefficient reports the grid supremum") {
  auto tv = ProcessSpec::tvtar(CoefficientCurve::linear(0.3, 0.2),
                               CoefficientCurve::constant(-0.2), InnovationLaw::gaussian(1));
  ContractionReport rep = contraction_coefficient(tv, 500, 11);
  CHECK(rep.s == doctest::Approx(0.7).epsilon(1e-3));  // |0.5| at u=1 plus |-0.2|
  CHECK(rep.mc_max_ratio <= rep.s + 1e-9);
}
