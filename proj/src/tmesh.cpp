#include "vofem/tmesh.hpp"

#include <cmath>
#include <string>

#include "vofem/errors.hpp"

namespace vofem {

TimeMesh build_mesh(double horizon, int steps, double grading) {
  if (!(horizon > 0.0)) throw DomainError("build_mesh: T must be positive");
  if (steps < 1) throw DomainError("build_mesh: N must be at least 1");
  if (!(grading >= 1.0)) throw DomainError("build_mesh: grading r must be >= 1");

  TimeMesh mesh;
  mesh.horizon = horizon;
  mesh.steps = steps;
  mesh.grading = grading;
  mesh.nodes.resize(steps + 1);
  mesh.taus.resize(steps + 1);
  for (int n = 0; n <= steps; ++n) {
    const double s = double(n) / steps;
    mesh.nodes(n) = grading == 1.0 ? horizon * s : horizon * std::pow(s, grading);
  }
  mesh.nodes(0) = 0.0;
  mesh.nodes(steps) = horizon;
  mesh.taus(0) = 0.0;
  for (int n = 1; n <= steps; ++n) mesh.taus(n) = mesh.nodes(n) - mesh.nodes(n - 1);
  return mesh;
}

double auto_grading(double alpha0) {
  if (!(alpha0 > 0.0) || alpha0 > 1.0) throw DomainError("auto_grading: alpha(0) must lie in (0, 1]");
  return alpha0 == 1.0 ? 1.0 : 2.0 / alpha0;
}

double guarded_pow(double x, double a) {
  if (x <= 0.0) return 0.0;
  return std::exp(a * std::log(x));
}

WeightRow weight_row(const TimeMesh& mesh, const VarOrder& order, int n) {
  if (n < 1 || n > mesh.steps)
    throw IndexError("weight_row: n = " + std::to_string(n) + " outside 1.." + std::to_string(mesh.steps));
  WeightRow row;
  row.n = n;
  const double tn = mesh.t(n);
  const double a = order(tn);
  row.alpha_n = a;
  row.b.resize(n);
  for (int k = 1; k < n; ++k) {
    // ((d + tau)^a - d^a) / tau with d = t_n - t_k, written to avoid cancellation
    const double d = tn - mesh.t(k);
    const double tau = mesh.tau(k);
    row.b(k - 1) = guarded_pow(d, a) * std::expm1(a * std::log1p(tau / d)) / tau;
  }
  row.b(n - 1) = guarded_pow(mesh.tau(n), a - 1.0);
  return row;
}

double discrete_caputo(std::span<const double> history, const WeightRow& row) {
  if (history.size() != std::size_t(row.n) + 1)
    throw LengthError("discrete_caputo: history must hold n + 1 values");
  double sum = 0.0;
  for (int k = 1; k <= row.n; ++k) sum += row.b(k - 1) * (history[k] - history[k - 1]);
  return sum / std::tgamma(1.0 + row.alpha_n);
}

double discrete_caputo(std::span<const double> history, const TimeMesh& mesh,
                       const VarOrder& order, int n) {
  if (history.size() != std::size_t(n) + 1)
    throw LengthError("discrete_caputo: history must hold n + 1 values");
  return discrete_caputo(history, weight_row(mesh, order, n));
}

WeightTable::WeightTable(const TimeMesh& mesh, const VarOrder& order, bool cache)
    : mesh_(mesh), order_(order), cache_(cache) {
  if (cache_) rows_.resize(mesh.steps + 1);
}

const WeightRow& WeightTable::row(int n) {
  if (!cache_) {
    scratch_ = weight_row(mesh_, order_, n);
    return scratch_;
  }
  if (n < 1 || n > mesh_.steps) throw IndexError("WeightTable: row index out of range");
  auto& slot = rows_[n];
  if (!slot) slot = weight_row(mesh_, order_, n);
  return *slot;
}

}  // namespace vofem
