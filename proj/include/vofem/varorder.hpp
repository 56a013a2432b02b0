#pragma once

#include <functional>
#include <string>
#include <vector>

namespace vofem {

using TimeFn = std::function<double(double)>;

/// Time-dependent fractional order alpha(t) on [0, T], carried with its
/// derivative. Values are expected in (0, 1]; check_assumption_a verifies.
class VarOrder {
 public:
  VarOrder(TimeFn alpha, TimeFn alpha_prime, double horizon);

  double operator()(double t) const { return alpha_(t); }
  double derivative(double t) const { return alpha_prime_(t); }

  double alpha0() const { return alpha0_; }
  double alpha1() const { return alpha1_; }
  double horizon() const { return horizon_; }

 private:
  TimeFn alpha_;
  TimeFn alpha_prime_;
  double horizon_;
  double alpha0_;
  double alpha1_;
};

/// Constant order alpha(t) = a.
VarOrder make_constant_order(double a, double horizon = 1.0);

/// The smooth transition family on [0, 1]
///   alpha(t) = a1 + (a0 - a1) ((1 - t) - sin(2 pi (1 - t)) / (2 pi)),
/// which moves monotonically from a0 at t = 0 to a1 at t = 1 with
/// alpha'(0) = alpha'(1) = 0.
VarOrder make_transition_order(double alpha0, double alpha1);

/// Kinetic coefficient k(t) with a sampled positive lower bound.
struct Kinetic {
  TimeFn k;
  double k_min = 0.0;

  double operator()(double t) const { return k(t); }
};

Kinetic make_constant_kinetic(double value);

/// Wraps an arbitrary k(t); k_min is the minimum over a uniform sample of
/// [0, horizon]. No positivity is enforced here.
Kinetic make_kinetic(TimeFn k, double horizon, int samples = 257);

struct AssumptionViolation {
  std::string condition;
  double t;
  double value;
};

struct AssumptionReport {
  bool passed = true;
  std::vector<std::string> checked;
  std::vector<AssumptionViolation> violations;
};

inline constexpr const char* kOrderBounds = "0 < alpha <= 1";
inline constexpr const char* kKineticPositive = "k_m > 0";
inline constexpr const char* kLogLimit = "(alpha(t) - alpha(0)) ln t -> 0";

/// Samples the order and kinetic coefficient on a grid that accumulates at
/// t = 0 (log-spaced over [1e-12, 1e-2] T) plus a uniform grid on [0, T].
/// Failures are collected, never thrown.
AssumptionReport check_assumption_a(const VarOrder& order, const Kinetic& kinetic,
                                    double horizon, int samples = 64);

}  // namespace vofem
