#include "regladder/rearrangement.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

#include "regladder/error.hpp"

namespace regladder {

namespace {

constexpr double kOverflowGuard = 1e300;

NormValue guarded(double v) {
  if (!std::isfinite(v) || v > kOverflowGuard) return {kInf, false};
  return {v, true};
}

void check_exponents(const StepRearrangement& r, double p, double q, double alpha, const char* op) {
  require(p >= 1, op, "p must be >= 1");
  require(q >= 1, op, "q must be >= 1");
  require(alpha >= 0, op, "alpha must be >= 0");
  require(alpha == 0 || r.measure() <= 1.0 + 1e-12, op,
          "log weights need |Omega| <= 1; rescale the domain first");
}

/// s^{1/p} |log s|^alpha
double weight(double s, double p, double alpha) {
  if (s <= 0) return 0.0;
  const double w = std::pow(s, 1.0 / p);
  return alpha == 0 ? w : w * std::pow(std::abs(std::log(s)), alpha);
}

/// Maximizer of s^{1/p}(-log s)^alpha on (0,1).
double weight_peak(double p, double alpha) { return std::exp(-alpha * p); }

/// int_a^b s^{beta-1} |log s|^c ds for 0 <= a < b <= 1.
double log_power_integral(double a, double b, double beta, double c) {
  b = std::min(b, 1.0);
  if (b <= a) return 0.0;
  if (c == 0) return (std::pow(b, beta) - std::pow(a, beta)) / beta;
  // s = e^{-u}: int_{u_b}^{u_a} e^{-beta u} u^c du = beta^{-(c+1)} [Gamma(c+1, beta u_b) - Gamma(c+1, beta u_a)]
  const double ub = std::max(0.0, -std::log(b));
  const double scale = std::pow(beta, -(c + 1));
  const double upper_b = boost::math::tgamma(c + 1, beta * ub);
  const double upper_a = a <= 0 ? 0.0 : boost::math::tgamma(c + 1, -beta * std::log(a));
  return scale * std::max(0.0, upper_b - upper_a);
}

}  // namespace

double StepRearrangement::total() const { return breaks.empty() ? 0.0 : maximal_F(*this, measure()); }

StepRearrangement rearrange(const GridField& f) {
  require(f.components() == 1, "rearrange", "vector fields have no decreasing rearrangement");
  std::vector<double> v(f.cell_count());
  for (std::size_t c = 0; c < v.size(); ++c) v[c] = std::abs(f(c));
  std::sort(v.begin(), v.end(), std::greater<>());
  StepRearrangement r;
  const double h = f.cell_volume();
  std::size_t i = 0;
  while (i < v.size()) {
    std::size_t j = i;
    while (j < v.size() && v[j] == v[i]) ++j;
    r.values.push_back(v[i]);
    r.breaks.push_back(static_cast<double>(j) * h);
    i = j;
  }
  return r;
}

double maximal_F(const StepRearrangement& r, double t) {
  require(t > 0 && t <= r.measure() * (1 + 1e-12), "maximal_F", "t must lie in (0, |Omega|]");
  double F = 0, prev = 0;
  for (std::size_t i = 0; i < r.breaks.size(); ++i) {
    const double b = std::min(r.breaks[i], t);
    F += r.values[i] * (b - prev);
    if (r.breaks[i] >= t) break;
    prev = r.breaks[i];
  }
  return F;
}

double f_star(const StepRearrangement& r, double s) {
  require(s > 0, "f_star", "s must be positive");
  auto it = std::lower_bound(r.breaks.begin(), r.breaks.end(), s);
  if (it == r.breaks.end()) return 0.0;
  return r.values[static_cast<std::size_t>(it - r.breaks.begin())];
}

double f_star_star(const StepRearrangement& r, double s) {
  require(s > 0, "f_star_star", "s must be positive");
  if (s >= r.measure()) return r.total() / s;
  return std::max(maximal_F(r, s) / s, f_star(r, s));
}

NormValue lorentz_zygmund_norm(const StepRearrangement& r, double p, double q, double alpha) {
  check_exponents(r, p, q, alpha, "lorentz_zygmund_norm");
  if (std::isinf(q)) {
    const double peak = weight_peak(p, alpha);
    double best = 0, a = 0;
    for (std::size_t i = 0; i < r.breaks.size(); ++i) {
      const double b = r.breaks[i];
      double w;
      if (alpha == 0 || b <= peak)
        w = weight(b, p, alpha);
      else if (a >= peak)
        w = weight(a, p, alpha);
      else
        w = weight(peak, p, alpha);
      best = std::max(best, r.values[i] * w);
      a = b;
    }
    return guarded(best);
  }
  double sum = 0, a = 0;
  for (std::size_t i = 0; i < r.breaks.size(); ++i) {
    const double b = r.breaks[i];
    if (r.values[i] > 0) sum += std::pow(r.values[i], q) * log_power_integral(a, b, q / p, alpha * q);
    a = b;
  }
  return guarded(std::pow(sum, 1.0 / q));
}

NormValue lorentz_zygmund_norm(const GridField& f, double p, double q, double alpha) {
  return lorentz_zygmund_norm(rearrange(f), p, q, alpha);
}

NormValue lorentz_maximal_norm(const StepRearrangement& r, double p, double alpha) {
  check_exponents(r, p, kInf, alpha, "lorentz_maximal_norm");
  const double peak = weight_peak(p, alpha);
  double best = 0, a = 0, Fa = 0;
  // f** >= f* holds exactly; taking the max keeps it under rounding too.
  auto eval = [&](double s, double F, double fstar) {
    if (s > 0) best = std::max(best, weight(s, p, alpha) * std::max(F / s, fstar));
  };
  for (std::size_t i = 0; i < r.breaks.size(); ++i) {
    const double b = r.breaks[i], v = r.values[i];
    const double Fb = Fa + v * (b - a);
    eval(a, Fa, v);
    eval(b, Fb, v);
    if (peak > a && peak < b) eval(peak, Fa + v * (peak - a), v);
    // Interior samples sharpen the sup between breakpoints.
    for (int m = 1; m < 8; ++m) {
      const double s = a + (b - a) * m / 8.0;
      eval(s, Fa + v * (s - a), v);
    }
    a = b;
    Fa = Fb;
  }
  return guarded(best);
}

}  // namespace regladder
