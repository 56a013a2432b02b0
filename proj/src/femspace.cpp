#include "vofem/femspace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vofem/errors.hpp"

namespace vofem {

namespace {

constexpr int kRulePoints = 3;  // conical product, exact to degree 5

int factorial(int n) { return n <= 1 ? 1 : n * factorial(n - 1); }

/// Affine data of one simplex: volume and barycentric gradients.
struct SimplexGeometry {
  double volume = 0.0;
  std::array<Eigen::Vector3d, 4> grad{};  ///< grad lambda_j, zero-padded
  std::array<Point, 4> x{};
};

template <int D>
SimplexGeometry geometry(const SpatialMesh& mesh, int s) {
  SimplexGeometry g;
  const auto& simplex = mesh.simplices[s];
  Eigen::Matrix<double, D, D> B;
  for (int j = 0; j <= D; ++j) g.x[j] = mesh.vertices[simplex[j]];
  for (int j = 0; j < D; ++j) B.col(j) = (g.x[j + 1] - g.x[0]).template head<D>();
  const double det = B.determinant();
  g.volume = std::abs(det) / factorial(D);
  const Eigen::Matrix<double, D, D> inv = B.inverse();
  Eigen::Matrix<double, D, 1> sum = Eigen::Matrix<double, D, 1>::Zero();
  for (int j = 1; j <= D; ++j) {
    g.grad[j].setZero();
    g.grad[j].template head<D>() = inv.row(j - 1).transpose();
    sum += inv.row(j - 1).transpose();
  }
  g.grad[0].setZero();
  g.grad[0].template head<D>() = -sum;
  return g;
}

SimplexGeometry geometry(const SpatialMesh& mesh, int s) {
  switch (mesh.dim) {
    case 1: return geometry<1>(mesh, s);
    case 2: return geometry<2>(mesh, s);
    default: return geometry<3>(mesh, s);
  }
}

Point map_point(const SimplexGeometry& g, const Eigen::Vector4d& lam, int dim) {
  Point p = Point::Zero();
  for (int j = 0; j <= dim; ++j) p += lam(j) * g.x[j];
  return p;
}

Point barycentre(const SimplexGeometry& g, int dim) {
  Point p = Point::Zero();
  for (int j = 0; j <= dim; ++j) p += g.x[j];
  return p / double(dim + 1);
}

int row_index(const SpatialMesh& mesh, int v, DofScope scope) {
  return scope == DofScope::full ? v : mesh.interior_index[v];
}

int scope_size(const SpatialMesh& mesh, DofScope scope) {
  return scope == DofScope::full ? mesh.num_vertices() : mesh.num_dofs();
}

Eigen::Matrix3d mean_tensor(const DiffusionTensor& K, const SimplexGeometry& g, int dim, bool at_points) {
  if (!at_points) return K.K(barycentre(g, dim));
  const auto& rule = simplex_rule(dim);
  Eigen::Matrix3d sum = Eigen::Matrix3d::Zero();
  for (std::size_t q = 0; q < rule.size(); ++q) sum += rule.weights[q] * K.K(map_point(g, rule.bary[q], dim));
  return sum;
}

void permutations_of(int d, std::vector<std::array<int, 3>>& out) {
  std::array<int, 3> p{0, 1, 2};
  std::sort(p.begin(), p.begin() + d);
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.begin() + d));
}

}  // namespace

SpatialMesh build_box_mesh(int dim, int cells) {
  if (dim < 1 || dim > 3) throw DomainError("build_box_mesh: dimension must be 1, 2 or 3");
  if (cells < 2) throw DomainError("build_box_mesh: need at least 2 cells per axis");

  SpatialMesh mesh;
  mesh.dim = dim;
  mesh.cells = cells;
  mesh.h = 1.0 / cells;
  const int side = cells + 1;
  const int ny = dim >= 2 ? side : 1, nz = dim == 3 ? side : 1;

  auto vid = [&](int i, int j, int k) { return i + side * (j + side * k); };
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < side; ++i) {
        Point p(double(i) / cells, double(j) / cells, double(k) / cells);
        if (dim < 3) p(2) = 0.0;
        if (dim < 2) p(1) = 0.0;
        mesh.vertices.push_back(p);
        const bool boundary = i == 0 || i == cells || (dim >= 2 && (j == 0 || j == cells)) ||
                              (dim == 3 && (k == 0 || k == cells));
        if (boundary) {
          mesh.interior_index.push_back(-1);
        } else {
          mesh.interior_index.push_back(int(mesh.dof_vertex.size()));
          mesh.dof_vertex.push_back(int(mesh.vertices.size()) - 1);
        }
      }

  std::vector<std::array<int, 3>> perms;
  permutations_of(dim, perms);
  const int cy = dim >= 2 ? cells : 1, cz = dim == 3 ? cells : 1;
  for (int k = 0; k < cz; ++k)
    for (int j = 0; j < cy; ++j)
      for (int i = 0; i < cells; ++i)
        for (const auto& perm : perms) {
          // walk from the cell's lower corner along the permuted axes
          std::array<int, 3> c{i, j, k};
          std::array<int, 4> simplex{vid(c[0], c[1], c[2]), 0, 0, 0};
          for (int step = 0; step < dim; ++step) {
            ++c[perm[step]];
            simplex[step + 1] = vid(c[0], c[1], c[2]);
          }
          mesh.simplices.push_back(simplex);
        }

  // positive orientation
  for (std::size_t s = 0; s < mesh.simplices.size(); ++s) {
    if (dim == 1) continue;
    auto& simplex = mesh.simplices[s];
    Eigen::Matrix3d B = Eigen::Matrix3d::Identity();
    for (int j = 0; j < dim; ++j)
      B.col(j).head(dim) = (mesh.vertices[simplex[j + 1]] - mesh.vertices[simplex[0]]).head(dim);
    if (B.topLeftCorner(dim, dim).determinant() < 0.0) std::swap(simplex[dim - 1], simplex[dim]);
  }
  return mesh;
}

double simplex_volume(const SpatialMesh& mesh, int s) { return geometry(mesh, s).volume; }

DiffusionTensor make_diagonal_diffusion(const Eigen::Vector3d& diagonal) {
  const Eigen::Matrix3d K = diagonal.asDiagonal();
  return DiffusionTensor{[K](const Point&) { return K; }, diagonal};
}

DiffusionTensor make_diffusion(std::function<Eigen::Matrix3d(const Point&)> K) {
  return DiffusionTensor{std::move(K), std::nullopt};
}

EllipticityBounds check_diffusion(const SpatialMesh& mesh, const DiffusionTensor& K) {
  EllipticityBounds bounds{std::numeric_limits<double>::infinity(), 0.0};
  const int d = mesh.dim;
  for (int s = 0; s < int(mesh.simplices.size()); ++s) {
    const auto g = geometry(mesh, s);
    const Eigen::MatrixXd k = K.K(barycentre(g, d)).topLeftCorner(d, d);
    if ((k - k.transpose()).norm() > 1e-13 * k.norm()) throw DomainError("check_diffusion: K is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k, Eigen::EigenvaluesOnly);
    bounds.lower = std::min(bounds.lower, eig.eigenvalues().minCoeff());
    bounds.upper = std::max(bounds.upper, eig.eigenvalues().maxCoeff());
  }
  if (!(bounds.lower > 0.0)) throw DomainError("check_diffusion: K is not positive definite");
  return bounds;
}

const quad::SimplexRule<double>& simplex_rule(int dim) {
  static const std::array<quad::SimplexRule<double>, 4> rules{
      quad::conical_simplex_rule<double>(0, kRulePoints), quad::conical_simplex_rule<double>(1, kRulePoints),
      quad::conical_simplex_rule<double>(2, kRulePoints), quad::conical_simplex_rule<double>(3, kRulePoints)};
  return rules.at(dim);
}

SparseMatrix assemble_mass(const SpatialMesh& mesh, DofScope scope) {
  const int d = mesh.dim;
  const double denom = double((d + 1) * (d + 2));
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(mesh.simplices.size() * (d + 1) * (d + 1));
  for (int s = 0; s < int(mesh.simplices.size()); ++s) {
    const double vol = simplex_volume(mesh, s);
    const auto& simplex = mesh.simplices[s];
    for (int a = 0; a <= d; ++a) {
      const int i = row_index(mesh, simplex[a], scope);
      if (i < 0) continue;
      for (int b = 0; b <= d; ++b) {
        const int j = row_index(mesh, simplex[b], scope);
        if (j < 0) continue;
        triplets.emplace_back(i, j, vol * (a == b ? 2.0 : 1.0) / denom);
      }
    }
  }
  const int n = scope_size(mesh, scope);
  SparseMatrix M(n, n);
  M.setFromTriplets(triplets.begin(), triplets.end());
  return M;
}

SparseMatrix assemble_stiffness(const SpatialMesh& mesh, const DiffusionTensor& K, const AssemblyOptions& opts) {
  const int d = mesh.dim;
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(mesh.simplices.size() * (d + 1) * (d + 1));
  for (int s = 0; s < int(mesh.simplices.size()); ++s) {
    const auto g = geometry(mesh, s);
    const Eigen::Matrix3d k = mean_tensor(K, g, d, opts.sample_at_quadrature_points);
    const auto& simplex = mesh.simplices[s];
    for (int a = 0; a <= d; ++a) {
      const int i = row_index(mesh, simplex[a], opts.scope);
      if (i < 0) continue;
      const Eigen::Vector3d kg = k * g.grad[a];
      for (int b = 0; b <= d; ++b) {
        const int j = row_index(mesh, simplex[b], opts.scope);
        if (j < 0) continue;
        triplets.emplace_back(i, j, g.volume * g.grad[b].dot(kg));
      }
    }
  }
  const int n = scope_size(mesh, opts.scope);
  SparseMatrix A(n, n);
  A.setFromTriplets(triplets.begin(), triplets.end());
  return A;
}

FieldVector assemble_load(const SpatialMesh& mesh, const SpatialFn& f) {
  const int d = mesh.dim;
  const auto& rule = simplex_rule(d);
  FieldVector load = FieldVector::Zero(mesh.num_dofs());
  for (int s = 0; s < int(mesh.simplices.size()); ++s) {
    const auto g = geometry(mesh, s);
    const auto& simplex = mesh.simplices[s];
    std::array<double, 4> local{};
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double fw = rule.weights[q] * f(map_point(g, rule.bary[q], d));
      for (int a = 0; a <= d; ++a) local[a] += fw * rule.bary[q](a);
    }
    for (int a = 0; a <= d; ++a) {
      const int i = mesh.interior_index[simplex[a]];
      if (i >= 0) load(i) += g.volume * local[a];
    }
  }
  return load;
}

FieldVector interpolate(const SpatialMesh& mesh, const SpatialFn& f) {
  FieldVector out(mesh.num_dofs());
  for (int i = 0; i < mesh.num_dofs(); ++i) out(i) = f(mesh.vertices[mesh.dof_vertex[i]]);
  return out;
}

FieldVector ritz_project(const SpatialMesh& mesh, const DiffusionTensor& K, const SpatialField& g,
                         const SolverConfig& cfg, const AssemblyOptions& opts) {
  if (!g.value) throw DomainError("ritz_project: field has no value");
  // g must vanish on the boundary
  double scale = 1.0, worst = 0.0;
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const double val = std::abs(g.value(mesh.vertices[v]));
    scale = std::max(scale, val);
    if (mesh.is_boundary(v)) worst = std::max(worst, val);
  }
  if (worst > 1e-10 * scale) throw DomainError("ritz_project: g does not vanish on the boundary");

  const int d = mesh.dim;
  AssemblyOptions interior = opts;
  interior.scope = DofScope::interior;
  const SparseMatrix A = assemble_stiffness(mesh, K, interior);

  FieldVector load = FieldVector::Zero(mesh.num_dofs());
  const auto& rule = simplex_rule(d);
  const auto& face_rule = simplex_rule(d - 1);
  for (int s = 0; s < int(mesh.simplices.size()); ++s) {
    const auto geo = geometry(mesh, s);
    const auto& simplex = mesh.simplices[s];
    Eigen::Vector3d kgrad = Eigen::Vector3d::Zero();  // int_T K grad g
    if (g.gradient) {
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const Point x = map_point(geo, rule.bary[q], d);
        const Eigen::Matrix3d k = opts.sample_at_quadrature_points ? K.K(x) : K.K(barycentre(geo, d));
        kgrad += rule.weights[q] * (k * g.gradient(x));
      }
      kgrad *= geo.volume;
    } else {
      // int_T grad g = -d |T| sum_j grad(lambda_j) mean_{F_j} g, F_j opposite vertex j
      Eigen::Vector3d grad_int = Eigen::Vector3d::Zero();
      for (int j = 0; j <= d; ++j) {
        double mean = 0.0;
        for (std::size_t q = 0; q < face_rule.size(); ++q) {
          Point x = Point::Zero();
          for (int a = 0, slot = 0; a <= d; ++a) {
            if (a == j) continue;
            x += face_rule.bary[q](slot++) * geo.x[a];
          }
          mean += face_rule.weights[q] * g.value(x);
        }
        grad_int -= d * geo.volume * mean * geo.grad[j];
      }
      kgrad = mean_tensor(K, geo, d, opts.sample_at_quadrature_points) * grad_int;
    }
    for (int a = 0; a <= d; ++a) {
      const int i = mesh.interior_index[simplex[a]];
      if (i >= 0) load(i) += geo.grad[a].dot(kgrad);
    }
  }
  return linear_solve(A, load, cfg).x;
}

double l2_error(const SpatialMesh& mesh, const FieldVector& u_h, const SpatialFn& exact) {
  if (u_h.size() != mesh.num_dofs()) throw LengthError("l2_error: coefficient vector has wrong length");
  const int d = mesh.dim;
  const auto& rule = simplex_rule(d);
  double sum = 0.0;
  for (int s = 0; s < int(mesh.simplices.size()); ++s) {
    const auto g = geometry(mesh, s);
    const auto& simplex = mesh.simplices[s];
    std::array<double, 4> c{};
    for (int a = 0; a <= d; ++a) {
      const int i = mesh.interior_index[simplex[a]];
      c[a] = i >= 0 ? u_h(i) : 0.0;
    }
    double local = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      double uh = 0.0;
      for (int a = 0; a <= d; ++a) uh += rule.bary[q](a) * c[a];
      const double e = uh - exact(map_point(g, rule.bary[q], d));
      local += rule.weights[q] * e * e;
    }
    sum += g.volume * local;
  }
  return std::sqrt(sum);
}

Eigen::VectorXd to_vertex_values(const SpatialMesh& mesh, const FieldVector& u_h) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(mesh.num_vertices());
  for (int i = 0; i < mesh.num_dofs(); ++i) out(mesh.dof_vertex[i]) = u_h(i);
  return out;
}

}  // namespace vofem
