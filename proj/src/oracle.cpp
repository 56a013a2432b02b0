#include "vofem/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vofem/errors.hpp"

namespace vofem {

double Mode::operator()(const Point& x) const {
  double v = 1.0;
  for (int j = 0; j < dim; ++j) v *= std::numbers::sqrt2 * std::sin(index[j] * std::numbers::pi * x(j));
  return v;
}

Mode make_mode(const std::array<int, 3>& index, int dim, const DiffusionTensor& K) {
  if (dim < 1 || dim > 3) throw DomainError("make_mode: dimension must be 1, 2 or 3");
  if (!K.constant_diagonal) throw DomainError("make_mode: sine modes need a constant diagonal K");
  Mode mode;
  mode.dim = dim;
  mode.index = index;
  for (int j = 0; j < dim; ++j) {
    if (index[j] < 1) throw DomainError("make_mode: mode indices start at 1");
    const double w = index[j] * std::numbers::pi;
    mode.lambda += (*K.constant_diagonal)(j) * w * w;
  }
  return mode;
}

double ModeSolution::at(double t) const {
  const auto& nodes = mesh.nodes;
  if (t <= nodes(0)) return coeff(0);
  if (t >= nodes(mesh.steps)) return coeff(mesh.steps);
  const auto* begin = nodes.data();
  const auto* it = std::upper_bound(begin, begin + nodes.size(), t);
  const int n = int(it - begin);
  if (nodes(n - 1) == t) return coeff(n - 1);
  const double w = (t - nodes(n - 1)) / (nodes(n) - nodes(n - 1));
  return (1.0 - w) * coeff(n - 1) + w * coeff(n);
}

ModeSolution mode_solve(const Mode& mode, const VarOrder& order, const Kinetic& kinetic, double initial_coeff,
                        const TimeFn& source_coeff, int fine_steps, double fine_grading) {
  if (fine_steps < 1024) throw DomainError("mode_solve: reference resolution needs at least 1024 steps");
  ModeSolution sol{build_mesh(order.horizon(), fine_steps, fine_grading), Eigen::VectorXd(fine_steps + 1)};
  const auto& mesh = sol.mesh;
  auto& c = sol.coeff;
  c(0) = initial_coeff;
  for (int n = 1; n <= fine_steps; ++n) {
    const WeightRow row = weight_row(mesh, order, n);
    const double tn = mesh.t(n), tau = mesh.tau(n), a = row.alpha_n;
    const double k = kinetic(tn);
    const double an = k / std::tgamma(1.0 + a);
    double hist = row.b(0) * c(0);
    for (int j = 1; j < n; ++j) hist += (row.b(j) - row.b(j - 1)) * c(j);
    const double lhs = 1.0 / tau + an * row.b(n - 1) + mode.lambda;
    double rhs = c(n - 1) / tau + an * hist;
    rhs -= k * guarded_pow(tn, a - 1.0) / std::tgamma(a) * initial_coeff;
    if (source_coeff) rhs += source_coeff(tn);
    c(n) = rhs / lhs;
  }
  return sol;
}

double project_onto_mode(const SpatialMesh& mesh, const FieldVector& u_h, const Mode& mode) {
  if (u_h.size() != mesh.num_dofs()) throw LengthError("project_onto_mode: coefficient vector has wrong length");
  return assemble_load(mesh, [&](const Point& x) { return mode(x); }).dot(u_h);
}

}  // namespace vofem
