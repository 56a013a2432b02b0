#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "vofem/fracops.hpp"
#include "vofem/stepper.hpp"

namespace vofem {

/// Manufactured solution u(x, t) = t^alpha(t) prod_j sin(2 pi x_j) on the
/// unit box with constant diagonal K. The source is
///   f = [g'(t) + k(t) RL-D^(1 - alpha(t)) g(t) + lambda g(t)] prod_j sin(2 pi x_j),
/// g(t) = t^alpha(t), lambda = (2 pi)^2 sum_j K_jj.
struct ManufacturedProblem {
  int dim = 1;
  VarOrder order;
  Kinetic kinetic;
  Eigen::Vector3d diffusion = Eigen::Vector3d::Constant(1e-3);
  double horizon = 1.0;
  double lambda = 0.0;
  QuadConfig quad;

  double g(double t) const;
  double g_prime(double t) const;
  double profile(const Point& x) const;
  Eigen::Vector3d profile_gradient(const Point& x) const;
  double exact(const Point& x, double t) const { return g(t) * profile(x); }

  double caputo_factor(double t) const;
  double rl_factor(double t) const;
  double source_factor(double t) const;

  /// Fractional factors cached at the nodes of one time mesh.
  struct NodeFactors {
    Eigen::VectorXd t, caputo, rl, source;
  };
  NodeFactors factors(const TimeMesh& mesh) const;

  /// Full problem on the given meshes; the source time factor is evaluated
  /// once per node.
  ProblemSpec spec(const TimeMesh& time_mesh, const SpatialMesh& space_mesh) const;
};

ManufacturedProblem build_manufactured(int dim, VarOrder order, Kinetic kinetic, const Eigen::Vector3d& diffusion,
                                       double horizon = 1.0, const QuadConfig& quad = {});

/// max_{1 <= n <= N} || u_h^n - u(t_n) ||_{L2}, by femspace::l2_error at each node.
double sup_l2_error(const SolveRecord& record, const TimeMesh& time_mesh, const SpatialMesh& space_mesh,
                    const std::function<double(const Point&, double)>& exact);

/// Same norm for a manufactured problem. The separable exact solution lets
/// the per-node error be formed from g(t_n), (phi, psi_i) and M.
double sup_l2_error(const SolveRecord& record, const ManufacturedProblem& problem, const TimeMesh& time_mesh,
                    const SpatialMesh& space_mesh);

/// max_n || I_h u(t_n) - u_h^n ||_{L2}, the discrete error against the nodal
/// interpolant; blind to the interpolation error of u itself.
double sup_interpolant_error(const SolveRecord& record, const ManufacturedProblem& problem,
                             const TimeMesh& time_mesh, const SpatialMesh& space_mesh);

/// rate_i = ln(e_i / e_{i+1}) / ln(ratio_i).
std::vector<double> estimate_rate(const std::vector<double>& errors, const std::vector<double>& ratios);

enum class SweepAxis { time, space };

/// l2: || u(t_n) - u_h^n ||; interpolant: || I_h u(t_n) - u_h^n ||.
enum class ErrorNorm { l2, interpolant };

struct SweepPoint {
  int steps = 8;
  int cells = 8;
  double grading = 1.0;
};

struct SweepPlan {
  int dim = 1;
  double alpha0 = 0.6;
  double alpha1 = 0.4;
  double kinetic = 1.0;
  Eigen::Vector3d diffusion = Eigen::Vector3d::Constant(1e-3);
  double horizon = 1.0;
  SweepAxis axis = SweepAxis::time;
  std::vector<SweepPoint> points;
  StepperConfig stepper;
  QuadConfig quad;
  LoadRule load_rule = LoadRule::quadrature;
  ErrorNorm norm = ErrorNorm::l2;
  bool enforce_spatial_resolution = true;  ///< time sweeps only
  int threads = 1;
  std::string label;
};

/// Time sweep at fixed cells per axis; grading 0 selects auto_grading(alpha0).
SweepPlan temporal_sweep(int dim, double alpha0, double alpha1, int cells, const std::vector<int>& steps,
                         double grading);
/// Space sweep on a uniform time mesh with N = m^2.
SweepPlan spatial_sweep(int dim, double alpha0, double alpha1, const std::vector<int>& cells);

struct ConvergenceRow {
  int steps = 0;
  int cells = 0;
  double h = 0.0;
  double grading = 1.0;
  double error = 0.0;
  std::optional<double> rate;
  double spatial_estimate = 0.0;  ///< time sweeps: Ritz error of u(T) on the space mesh
  double wall_time = 0.0;
};

struct ConvergenceTable {
  SweepAxis axis = SweepAxis::time;
  int dim = 1;
  double alpha0 = 0.0;
  double alpha1 = 0.0;
  std::string label;
  ErrorNorm norm = ErrorNorm::l2;
  LoadRule load_rule = LoadRule::quadrature;
  std::vector<ConvergenceRow> rows;
};

ConvergenceTable run_convergence(const SweepPlan& plan);

/// "# key=value" header lines followed by "axis,error,rate"; scientific,
/// six significant digits.
std::string to_csv(const ConvergenceTable& table);
nlohmann::json to_json(const ConvergenceTable& table);
nlohmann::json to_json(const std::vector<ConvergenceTable>& tables);

/// Thread count from VOFEM_THREADS, default 1.
int threads_from_env();

}  // namespace vofem
