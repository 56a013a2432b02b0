#pragma once

#include <array>

#include "vofem/femspace.hpp"
#include "vofem/tmesh.hpp"
#include "vofem/varorder.hpp"

namespace vofem {

/// Dirichlet eigenpair of -div(K grad) on the unit box for constant diagonal
/// K: phi(x) = prod_j sqrt(2) sin(i_j pi x_j), lambda = sum_j K_jj (i_j pi)^2.
struct Mode {
  int dim = 1;
  std::array<int, 3> index{1, 1, 1};
  double lambda = 0.0;

  double operator()(const Point& x) const;
};

/// Throws DomainError unless K is a constant diagonal tensor.
Mode make_mode(const std::array<int, 3>& index, int dim, const DiffusionTensor& K);

/// Expansion coefficient c(t_n) of one mode on a fine graded mesh.
struct ModeSolution {
  TimeMesh mesh;
  Eigen::VectorXd coeff;

  /// Piecewise-linear in time; exact at mesh nodes.
  double at(double t) const;
};

/// Solves c' + k(t) RL-D^(1 - alpha(t)) c + lambda c = f(t), c(0) = c0 with
/// the same L1-type weights as the FEM march, on t_n = T (n/N)^r.
ModeSolution mode_solve(const Mode& mode, const VarOrder& order, const Kinetic& kinetic, double initial_coeff,
                        const TimeFn& source_coeff, int fine_steps, double fine_grading);

/// int u_h phi over the mesh, by the FEM load quadrature.
double project_onto_mode(const SpatialMesh& mesh, const FieldVector& u_h, const Mode& mode);

}  // namespace vofem
