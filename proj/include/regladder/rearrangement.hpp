#pragma once

// Decreasing rearrangement f* of a sampled density and the
// rearrangement-invariant Lorentz-Zygmund norms built from it.

#include <limits>
#include <vector>

#include "regladder/field.hpp"

namespace regladder {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Nonincreasing step function: f*(s) = values[i] for s in (breaks[i-1], breaks[i]],
/// with breaks[-1] = 0.
struct StepRearrangement {
  std::vector<double> breaks;
  std::vector<double> values;

  double measure() const { return breaks.empty() ? 0.0 : breaks.back(); }
  /// Integral of f* over (0, measure()].
  double total() const;
};

/// Sorts |f| cell values in descending order, each carrying the cell measure.
/// Runs of equal values are merged into one step.
StepRearrangement rearrange(const GridField& f);

/// F(t) = integral of f* over (0, t].
double maximal_F(const StepRearrangement& r, double t);
/// f*(s), right-continuous convention at the breakpoints.
double f_star(const StepRearrangement& r, double s);
/// f**(s) = F(s)/s.
double f_star_star(const StepRearrangement& r, double s);

struct NormValue {
  double value = 0;
  bool finite = true;  // false when the value overflows the guard
};

/// Lorentz-Zygmund functional
///   (int_0^|Omega| [s^{1/p} |log s|^alpha f*(s)]^q ds/s)^{1/q},
/// and for q = infinity the weak norm sup_s s^{1/p}|log s|^alpha f*(s).
/// Natural logarithms; alpha != 0 needs |Omega| <= 1.
NormValue lorentz_zygmund_norm(const StepRearrangement& r, double p, double q, double alpha);
NormValue lorentz_zygmund_norm(const GridField& f, double p, double q, double alpha);

/// Maximal-function variant sup_s s^{1/p}|log s|^alpha f**(s).
NormValue lorentz_maximal_norm(const StepRearrangement& r, double p, double alpha);

}  // namespace regladder
