#pragma once

#include "vofem/quadrature.hpp"
#include "vofem/varorder.hpp"

namespace vofem {

/// Scalar function of time with an optional derivative.
struct ScalarFn {
  TimeFn value;
  TimeFn derivative;
};

/// Tolerances for the singular-kernel quadrature. The panel grading must be
/// strong enough that the endpoint panels resolve s^(alpha - 1) behaviour:
/// the first-panel error decays like P^(-grading * alpha_min). The grading
/// actually used is max(grading, 4.8 / min(alpha(t), alpha(0))).
struct QuadConfig {
  double rel_tol = 1e-10;
  int max_panels = 1 << 16;
  double grading = 12.0;
  int order = 16;
};

void validate(const QuadConfig& cfg);

/// (1 / Gamma(alpha(t))) int_0^t g(s) (t - s)^(alpha(t) - 1) ds.
double frac_integral_vo(const ScalarFn& g, const VarOrder& order, double t, const QuadConfig& cfg = {});

/// Caputo derivative of order 1 - alpha(t): the fractional integral of g'.
double caputo_vo(const ScalarFn& g, const VarOrder& order, double t, const QuadConfig& cfg = {});

/// Riemann-Liouville derivative of order 1 - alpha(t), through the
/// initial-value correction g(0) t^(alpha(t) - 1) / Gamma(alpha(t)).
double riemann_liouville_vo(const ScalarFn& g, const VarOrder& order, double t, const QuadConfig& cfg = {});

}  // namespace vofem
