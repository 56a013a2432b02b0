#pragma once

#include <Eigen/Core>

#include <optional>
#include <span>
#include <vector>

#include "vofem/varorder.hpp"

namespace vofem {

/// Graded temporal partition t_n = T (n/N)^r, 0 <= n <= N. r = 1 is uniform.
struct TimeMesh {
  double horizon = 1.0;
  int steps = 0;
  double grading = 1.0;
  Eigen::VectorXd nodes;  ///< t_0 .. t_N
  Eigen::VectorXd taus;   ///< taus(n) = t_n - t_{n-1}; taus(0) = 0

  double t(int n) const { return nodes(n); }
  double tau(int n) const { return taus(n); }
};

TimeMesh build_mesh(double horizon, int steps, double grading);

/// Grading exponent that restores first order in time: 1 when the order
/// starts at 1, otherwise 2 / alpha(0).
double auto_grading(double alpha0);

/// Row n of the L1-type weights b^n_k, k = 1..n, stored with b(k - 1) = b^n_k.
struct WeightRow {
  int n = 0;
  double alpha_n = 1.0;
  Eigen::VectorXd b;
};

/// x^a for x >= 0 and a > 0, with 0^a = 0.
double guarded_pow(double x, double a);

WeightRow weight_row(const TimeMesh& mesh, const VarOrder& order, int n);

/// (1 / Gamma(1 + alpha(t_n))) sum_k b^n_k (g_k - g_{k-1}) for a history
/// g_0 .. g_n sampled at the mesh nodes.
double discrete_caputo(std::span<const double> history, const TimeMesh& mesh,
                       const VarOrder& order, int n);
double discrete_caputo(std::span<const double> history, const WeightRow& row);

/// Weight rows on demand, optionally memoised. Rows share nothing (alpha
/// changes with n), so caching only saves the recomputation on revisits.
class WeightTable {
 public:
  WeightTable(const TimeMesh& mesh, const VarOrder& order, bool cache = false);

  const WeightRow& row(int n);

 private:
  const TimeMesh& mesh_;
  const VarOrder& order_;
  bool cache_;
  WeightRow scratch_;
  std::vector<std::optional<WeightRow>> rows_;
};

}  // namespace vofem
