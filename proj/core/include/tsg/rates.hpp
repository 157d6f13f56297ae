#pragma once

#include <string>
#include <vector>

namespace tsg::rates {

// Regime of the dependence-decay exponent chi relative to the phase
// boundary chi0(p).  Below the boundary the achievable approximation rate
// is dependence-limited; at or above it the rate saturates at n^{1/p}.
enum class Regime { SubCritical, CriticalSmallP, CriticalLargeP, SuperCritical };

std::string regime_name(Regime r);

// Polynomial building blocks of the rate calculus; p is the moment order
// (p > 2), chi the polynomial decay exponent of the dependence tail sums.
double f1(double p, double chi);
double f2(double p, double chi);
double f3(double p, double chi);
double f4(double p, double chi);
double f5(double p, double chi);

// Phase boundary: chi0(4) = 1 exactly.
double chi0(double p);

// Closed-form solution of the three-equation exponent system, valid for
// 0 < chi <= chi0(p).
double inv_r(double p, double chi);
double gamma_exp(double p, double chi);
double cap_l(double p, double chi);

// Largest admissible log-trimming power for the block-width schedule.
double k_max(double p, double chi);

// Minimum admissible logarithmic-decay power A for the tail-sum bound;
// equals 2*gamma/p.  a_lower_bound_critical is its value at chi = chi0.
double a_lower_bound(double p, double chi);
double a_lower_bound_critical(double p);

Regime classify(double p, double chi);

struct RatePoint {
  double p = 0, chi = 0;
  double chi0 = 0;
  Regime regime = Regime::SubCritical;
  double inv_r = 0;   // 1/r
  double gamma = 0;
  double cap_l = 0;   // block-width exponent L
  double k_max = 0;
  double tau_exponent = 0;  // the coupling error is o(n^{tau_exponent})
  bool log_factor = false;
  double a_min = 0;
  // Whether a supplied logarithmic-decay power A met a_min (always true
  // when no A was checked; SuperCritical needs only A > 0).
  bool a_ok = true;
};

// Evaluates the full rate profile at (p, chi).  In the super-critical
// regime gamma, L and 1/r are evaluated at the boundary chi0(p), where the
// exponent system saturates.  Throws ConfigError for p <= 2 or chi <= 0.
RatePoint evaluate(double p, double chi);

// Residuals of the three defining equations at a candidate solution;
// all three vanish (to rounding) at the closed forms above.
struct SystemResiduals {
  double eq1, eq2, eq3;
};
SystemResiduals system_residuals(double p, double chi, double inv_r,
                                 double gamma, double cap_l);

std::vector<RatePoint> rate_table(double p, double chi_lo, double chi_hi, int count);

}  // namespace tsg::rates
