#include "tsg/rates.hpp"

#include <cassert>
#include <cmath>

#include "tsg/util.hpp"

namespace tsg::rates {

namespace {

constexpr double kCriticalTol = 1e-9;

void check_domain(double p, double chi) {
  if (!(p > 2.0)) throw ConfigError("rate calculus requires moment order p > 2");
  if (!(chi > 0.0)) throw ConfigError("rate calculus requires decay exponent chi > 0");
}

double sqrt_nonneg(double x) {
  // Arguments are algebraically nonnegative in-domain; a materially
  // negative value indicates a domain bug upstream.
  if (x < 0) {
    if (x < -1e-9) throw std::logic_error("rate calculus: negative sqrt argument");
    x = 0;
  }
  return std::sqrt(x);
}

}  // namespace

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::SubCritical: return "SubCritical";
    case Regime::CriticalSmallP: return "CriticalSmallP";
    case Regime::CriticalLargeP: return "CriticalLargeP";
    case Regime::SuperCritical: return "SuperCritical";
  }
  return "?";
}

double f1(double p, double chi) { return p * p * chi * chi + p * p * chi; }

double f2(double p, double chi) { return 2 * p * chi * chi + 3 * p * chi - 2 * chi; }

double f3(double p, double chi) {
  double onechi = 1 + chi;
  return p * p * p * onechi * onechi + 6 * f1(p, chi) + 4 * p * chi - 2;
}

double f4(double p, double chi) {
  return 2 * p * (2 * p * chi * chi + 3 * p * chi + p - 2);
}

double f5(double p, double chi) {
  double t1 = p * p * (p * p + 4 * p - 12) * chi * chi;
  double t2 = 2 * p * (p * p * p + p * p - 4 * p - 4) * chi;
  double t3 = (p * p - p - 2) * (p * p - p - 2);
  return t1 + t2 + t3;
}

double chi0(double p) {
  if (!(p > 2.0)) throw ConfigError("chi0 requires p > 2");
  return (p * p - 4 + (p - 2) * std::sqrt(p * p + 20 * p + 4)) / (8 * p);
}

double inv_r(double p, double chi) {
  check_domain(p, chi);
  double disc = (p - 2) * (f3(p, chi) - 3 * p);
  double num = f1(p, chi) + p * p * chi + p * p - 2 * p + f2(p, chi) -
               chi * sqrt_nonneg(disc);
  return num / f4(p, chi);
}

double gamma_exp(double p, double chi) {
  check_domain(p, chi);
  return ((2 * p + p * p) * chi + p * p + 3 * p + 2 + sqrt_nonneg(f5(p, chi))) /
         (2 + 2 * p + 4 * chi);
}

double cap_l(double p, double chi) {
  check_domain(p, chi);
  double disc = (p - 2) * (f3(p, chi) - 3 * p);
  return (f1(p, chi) - f2(p, chi) + chi * sqrt_nonneg(disc)) / (chi * f4(p, chi));
}

double k_max(double p, double chi) {
  double g = gamma_exp(p, chi);
  return (g - p) / (g / 2 - 1);
}

double a_lower_bound(double p, double chi) {
  check_domain(p, chi);
  if (chi > chi0(p) * (1 + kCriticalTol))
    throw ConfigError("a_lower_bound defined only for chi <= chi0(p)");
  return ((2 * p + p * p) * chi + p * p + 3 * p + 2 + sqrt_nonneg(f5(p, chi))) /
         (p * (1 + p + 2 * chi));
}

double a_lower_bound_critical(double p) {
  if (!(p > 2.0)) throw ConfigError("a_lower_bound_critical requires p > 2");
  return (p * p + 8 * p + 4 + (p - 2) * std::sqrt(p * p + 20 * p + 4)) / (6 * p);
}

Regime classify(double p, double chi) {
  check_domain(p, chi);
  double c0 = chi0(p);
  // Floating-point inputs cannot hit the algebraic boundary exactly; a
  // relative tolerance decides ties.
  if (std::abs(chi - c0) <= kCriticalTol * std::max(1.0, c0))
    return p < 4.0 ? Regime::CriticalSmallP : Regime::CriticalLargeP;
  return chi < c0 ? Regime::SubCritical : Regime::SuperCritical;
}

RatePoint evaluate(double p, double chi) {
  check_domain(p, chi);
  RatePoint rp;
  rp.p = p;
  rp.chi = chi;
  rp.chi0 = chi0(p);
  rp.regime = classify(p, chi);
  // Beyond the boundary the exponent system saturates at chi0.
  double chi_eff = std::min(chi, rp.chi0);
  rp.inv_r = inv_r(p, chi_eff);
  rp.gamma = gamma_exp(p, chi_eff);
  rp.cap_l = cap_l(p, chi_eff);
  rp.k_max = (rp.gamma - p) / (rp.gamma / 2 - 1);
  rp.tau_exponent = rp.regime == Regime::SubCritical ? rp.inv_r : 1.0 / p;
  rp.log_factor = rp.regime == Regime::CriticalLargeP;
  rp.a_min = a_lower_bound(p, chi_eff);
  return rp;
}

SystemResiduals system_residuals(double p, double chi, double inv_r_val,
                                 double gamma, double cap_l_val) {
  SystemResiduals res;
  res.eq1 = 0.5 - inv_r_val - chi * cap_l_val;
  res.eq2 = 1.0 - gamma * inv_r_val + cap_l_val * (gamma / 2 - 1);
  res.eq3 = 1.0 / p - 1.0 / gamma + (1.0 - (chi + 1) * p / gamma) * cap_l_val;
  return res;
}

std::vector<RatePoint> rate_table(double p, double chi_lo, double chi_hi, int count) {
  if (count < 0) throw ConfigError("rate_table: negative count");
  std::vector<RatePoint> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    double chi = count == 1
                     ? chi_lo
                     : chi_lo + (chi_hi - chi_lo) * static_cast<double>(i) /
                           static_cast<double>(count - 1);
    out.push_back(evaluate(p, chi));
  }
  return out;
}

}  // namespace tsg::rates
