#include <benchmark/benchmark.h>

#include "tsg/construction.hpp"
#include "tsg/linalg.hpp"
#include "tsg/process.hpp"
#include "tsg/rates.hpp"

namespace {

tsg::ProcessSpec ar_half() { return tsg::ProcessSpec::ar1(0.5, tsg::InnovationLaw::gaussian(1)); }

void bm_rate_point(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(tsg::rates::evaluate(4.0, 0.5));
}
BENCHMARK(bm_rate_point);

void bm_simulate_ar1(benchmark::State& state) {
  auto spec = ar_half();
  const int n = static_cast<int>(state.range(0));
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(tsg::simulate(spec, n, seed++));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(bm_simulate_ar1)->Arg(1024)->Arg(8192);

void bm_coupling_report(benchmark::State& state) {
  auto spec = ar_half();
  const int n = static_cast<int>(state.range(0));
  auto scheme = tsg::gauss::make_scheme(n, 4.0, 0.5, 4.0, 2.8284271247461903, 4.0);
  tsg::gauss::MDepOptions opts;
  opts.resamples = 8;
  std::uint64_t seed = 1;
  for (auto _ : state)
    benchmark::DoNotOptimize(tsg::gauss::coupling_report(spec, scheme, seed++, opts));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(bm_coupling_report)->Arg(1024)->Arg(4096);

void bm_psd_sqrt(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  Eigen::MatrixXd a = Eigen::MatrixXd::Random(d, d);
  Eigen::MatrixXd v = a * a.transpose();
  for (auto _ : state) benchmark::DoNotOptimize(tsg::psd_sqrt(v));
}
BENCHMARK(bm_psd_sqrt)->Arg(4)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
