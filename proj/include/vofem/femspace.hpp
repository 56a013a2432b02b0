#pragma once

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "vofem/quadrature.hpp"
#include "vofem/sparsela.hpp"

namespace vofem {

/// Points always carry three coordinates; those beyond the mesh dimension are 0.
using Point = Eigen::Vector3d;
using SpatialFn = std::function<double(const Point&)>;
using GradientFn = std::function<Eigen::Vector3d(const Point&)>;
using FieldVector = Eigen::VectorXd;

/// A function of position with an optional gradient.
struct SpatialField {
  SpatialFn value;
  GradientFn gradient;
};

/// Kuhn triangulation of the unit box (0,1)^d with m cells per axis.
/// Vertices are numbered lexicographically with x fastest.
struct SpatialMesh {
  int dim = 0;
  int cells = 0;
  double h = 0.0;
  std::vector<Point> vertices;
  std::vector<std::array<int, 4>> simplices;  ///< first dim + 1 entries used
  std::vector<int> interior_index;            ///< vertex -> dof, or -1 on the boundary
  std::vector<int> dof_vertex;                ///< dof -> vertex

  int num_dofs() const { return int(dof_vertex.size()); }
  int num_vertices() const { return int(vertices.size()); }
  bool is_boundary(int v) const { return interior_index[v] < 0; }
};

SpatialMesh build_box_mesh(int dim, int cells);

double simplex_volume(const SpatialMesh& mesh, int s);

/// Symmetric diffusion tensor K(x). Constant diagonal tensors are flagged so
/// spectral tools can use them.
struct DiffusionTensor {
  std::function<Eigen::Matrix3d(const Point&)> K;
  std::optional<Eigen::Vector3d> constant_diagonal;
};

DiffusionTensor make_diagonal_diffusion(const Eigen::Vector3d& diagonal);
DiffusionTensor make_diffusion(std::function<Eigen::Matrix3d(const Point&)> K);

struct EllipticityBounds {
  double lower;
  double upper;
};

/// Samples K at simplex barycentres; throws DomainError when K is not
/// symmetric positive definite somewhere.
EllipticityBounds check_diffusion(const SpatialMesh& mesh, const DiffusionTensor& K);

enum class DofScope { interior, full };

struct AssemblyOptions {
  DofScope scope = DofScope::interior;
  bool sample_at_quadrature_points = false;  ///< otherwise K(barycentre) per simplex
};

/// Degree-5 rule on the reference simplex of the given dimension.
const quad::SimplexRule<double>& simplex_rule(int dim);

SparseMatrix assemble_mass(const SpatialMesh& mesh, DofScope scope = DofScope::interior);
SparseMatrix assemble_stiffness(const SpatialMesh& mesh, const DiffusionTensor& K, const AssemblyOptions& opts = {});

/// (f, phi_i) over interior dofs.
FieldVector assemble_load(const SpatialMesh& mesh, const SpatialFn& f);

/// Nodal interpolant restricted to interior dofs.
FieldVector interpolate(const SpatialMesh& mesh, const SpatialFn& f);

/// Elliptic projection onto S_h: (K grad(g - Pg), grad chi) = 0. Without
/// a gradient the load uses the divergence theorem on each simplex, which
/// needs only face values of g.
FieldVector ritz_project(const SpatialMesh& mesh, const DiffusionTensor& K, const SpatialField& g,
                         const SolverConfig& cfg = {}, const AssemblyOptions& opts = {});

double l2_error(const SpatialMesh& mesh, const FieldVector& u_h, const SpatialFn& exact);

/// Values on every vertex, zero on the boundary.
Eigen::VectorXd to_vertex_values(const SpatialMesh& mesh, const FieldVector& u_h);

}  // namespace vofem
