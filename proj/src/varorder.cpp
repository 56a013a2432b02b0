#include "vofem/varorder.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vofem/errors.hpp"

namespace vofem {

VarOrder::VarOrder(TimeFn alpha, TimeFn alpha_prime, double horizon)
    : alpha_(std::move(alpha)), alpha_prime_(std::move(alpha_prime)), horizon_(horizon) {
  if (!(horizon_ > 0.0)) throw DomainError("VarOrder: horizon must be positive");
  if (!alpha_ || !alpha_prime_) throw DomainError("VarOrder: alpha and alpha' are required");
  alpha0_ = alpha_(0.0);
  alpha1_ = alpha_(horizon_);
}

VarOrder make_constant_order(double a, double horizon) {
  return VarOrder([a](double) { return a; }, [](double) { return 0.0; }, horizon);
}

VarOrder make_transition_order(double alpha0, double alpha1) {
  auto in_range = [](double a) { return a > 0.0 && a <= 1.0; };
  if (!in_range(alpha0) || !in_range(alpha1))
    throw DomainError("make_transition_order: alpha0 and alpha1 must lie in (0, 1]");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double jump = alpha0 - alpha1;
  auto alpha = [alpha1, jump](double t) {
    const double s = 1.0 - t;
    return alpha1 + jump * (s - std::sin(two_pi * s) / two_pi);
  };
  auto alpha_prime = [jump](double t) { return jump * (std::cos(two_pi * (1.0 - t)) - 1.0); };
  return VarOrder(alpha, alpha_prime, 1.0);
}

Kinetic make_constant_kinetic(double value) {
  return Kinetic{[value](double) { return value; }, value};
}

Kinetic make_kinetic(TimeFn k, double horizon, int samples) {
  double k_min = k(0.0);
  for (int i = 1; i < samples; ++i) k_min = std::min(k_min, k(horizon * i / (samples - 1)));
  return Kinetic{std::move(k), k_min};
}

AssumptionReport check_assumption_a(const VarOrder& order, const Kinetic& kinetic,
                                    double horizon, int samples) {
  if (samples < 16) throw DomainError("check_assumption_a: need at least 16 samples");

  // Log-spaced part first, smallest t at the front.
  std::vector<double> grid;
  const int n_log = samples / 2;
  for (int i = 0; i < n_log; ++i) {
    const double e = -12.0 + 10.0 * i / (n_log - 1);
    grid.push_back(horizon * std::pow(10.0, e));
  }
  const int n_uniform = samples - n_log;
  for (int i = 0; i < n_uniform; ++i) grid.push_back(horizon * i / (n_uniform - 1));

  AssumptionReport report;
  report.checked = {kOrderBounds, kKineticPositive, kLogLimit};

  for (double t : grid) {
    const double a = order(t);
    if (!(a > 0.0) || a > 1.0) report.violations.push_back({kOrderBounds, t, a});
    const double k = kinetic(t);
    if (!(k > 0.0)) report.violations.push_back({kKineticPositive, t, k});
  }

  // The limit can only be probed: |(alpha(t) - alpha(0)) ln t| must shrink
  // along the three smallest samples, unless it is already negligible.
  const double a0 = order(0.0);
  double prev = 0.0;
  for (int i = 2; i >= 0; --i) {
    const double t = grid[i];
    const double q = std::abs((order(t) - a0) * std::log(t));
    if (i < 2 && q >= prev && q > 1e-12) {
      report.violations.push_back({kLogLimit, t, q});
      break;
    }
    prev = q;
  }

  report.passed = report.violations.empty();
  return report;
}

}  // namespace vofem
