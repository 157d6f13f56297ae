#include <doctest.h>

#include <atomic>
#include <set>

#include "tsg/linalg.hpp"
#include "tsg/util.hpp"

using namespace tsg;

TEST_CASE("splitmix64 matches the reference output stream") {
  // Reference vector for the standard splitmix64 with seed state 0.
  CHECK(splitmix64(0) == 0xE220A8397B1DCDAFull);
  CHECK(splitmix64(1) == 0x910A2DEC89025CC1ull);
}

TEST_CASE("seed_stream separates replications and masters") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t m = 0; m < 8; ++m)
    for (std::uint64_t r = 0; r < 64; ++r) seen.insert(seed_stream(m, r));
  CHECK(seen.size() == 8 * 64);
  CHECK(seed_stream(5, 3) == seed_stream(5, 3));
}

TEST_CASE("quantile and median with linear interpolation") {
  std::vector<double> v{4, 1, 3, 2};
  CHECK(median(v) == doctest::Approx(2.5));
  CHECK(quantile(v, 0.0) == 1);
  CHECK(quantile(v, 1.0) == 4);
  CHECK(quantile(v, 1.0 / 3.0) == doctest::Approx(2.0));
  CHECK_THROWS(quantile({}, 0.5));
}

TEST_CASE("ks_distance extremes and a hand-computed case") {
  CHECK(ks_distance({1, 2, 3}, {1, 2, 3}) == doctest::Approx(0.0));
  CHECK(ks_distance({1, 2}, {10, 11}) == doctest::Approx(1.0));
  // F_a jumps at {0,1}, F_b at {0.5,1.5}: sup gap is 1/2.
  CHECK(ks_distance({0, 1}, {0.5, 1.5}) == doctest::Approx(0.5));
}

TEST_CASE("parallel_for covers every index exactly once and rethrows") {
  std::vector<std::atomic<int>> hits(257);
  parallel_for(257, [&](int i) { hits[static_cast<std::size_t>(i)]++; });
  for (auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(4, [](int i) {
    if (i == 2) throw ConfigError("boom");
  }), ConfigError);
}

TEST_CASE("psd_sqrt round trip and symmetry guard") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Random(5, 5);
  Eigen::MatrixXd v = a * a.transpose();
  Eigen::MatrixXd s = psd_sqrt(v);
  CHECK((s * s - v).norm() <= 1e-9 * (1.0 + v.norm()));
  CHECK(is_symmetric(s));
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(2, 2);
  bad(0, 1) = 1.0;
  CHECK_THROWS(psd_sqrt(bad));
}

TEST_CASE("min_eigenvalue on a known diagonal") {
  Eigen::MatrixXd d = Eigen::Vector3d(3.0, -2.0, 7.0).asDiagonal();
  CHECK(min_eigenvalue(d) == doctest::Approx(-2.0));
}
