#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace tsg {

// Thrown on malformed user input (configs, CLI arguments, bad parameter
// combinations).  Distinct from std::runtime_error so callers can map the
// two classes to different exit codes.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Deterministic per-replication seed derivation: replication r of a run
// with a given master seed always sees the same stream, independent of
// worker scheduling.
inline std::uint64_t seed_stream(std::uint64_t master, std::uint64_t replication) {
  return splitmix64(splitmix64(master) + 0x632BE59BD9B4E019ull * (replication + 1));
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
  return std::mt19937_64(seed);
}

// Number of worker threads: TSG_WORKERS if set, else hardware concurrency.
int worker_count();

// Runs fn(i) for i in [0, count) on the worker pool.  fn must only touch
// slot i of any shared output, so results are deterministic regardless of
// scheduling.
void parallel_for(int count, const std::function<void(int)>& fn);

// Order statistic with linear interpolation, q in [0,1].  Sorts a copy.
inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw std::invalid_argument("quantile of empty sample");
  std::sort(v.begin(), v.end());
  if (q <= 0) return v.front();
  if (q >= 1) return v.back();
  double pos = q * static_cast<double>(v.size() - 1);
  auto lo = static_cast<std::size_t>(pos);
  double frac = pos - static_cast<double>(lo);
  if (lo + 1 >= v.size()) return v.back();
  return v[lo] * (1.0 - frac) + v[lo + 1] * frac;
}

inline double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

// Two-sample Kolmogorov-Smirnov distance sup_x |F_a(x) - F_b(x)|.
double ks_distance(std::vector<double> a, std::vector<double> b);

}  // namespace tsg
