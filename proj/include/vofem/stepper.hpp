#pragma once

#include <functional>
#include <span>
#include <vector>

#include "vofem/femspace.hpp"
#include "vofem/tmesh.hpp"
#include "vofem/varorder.hpp"

namespace vofem {

/// Right-hand side f(x, t). Separable parts time(t) * profile(x) have their
/// spatial load assembled once; the general part is re-assembled per step.
struct SourceTerm {
  struct Separable {
    TimeFn time;
    SpatialFn profile;
  };

  std::function<double(const Point&, double)> general;
  std::vector<Separable> separable;

  double operator()(const Point& x, double t) const;
};

/// How (g, phi_i) is formed for data g: by volume quadrature, or as M I_h g
/// with I_h the nodal interpolant.
enum class LoadRule { quadrature, interpolated };

struct ProblemSpec {
  VarOrder order;
  Kinetic kinetic;
  DiffusionTensor diffusion;
  SpatialField initial;  ///< u_0; an empty value means u_0 = 0
  SourceTerm source;
  TimeMesh time_mesh;
  SpatialMesh space_mesh;
  LoadRule load_rule = LoadRule::quadrature;
};

/// Everything the time march needs from the spatial discretisation.
struct SemiDiscreteSystem {
  SparseMatrix mass;
  SparseMatrix stiffness;
  FieldVector initial;       ///< u_h^0
  FieldVector initial_load;  ///< (u_0, phi_i)
  std::function<FieldVector(int n, double t)> source_load;  ///< empty means f = 0
};

SemiDiscreteSystem discretize(const ProblemSpec& spec, const SolverConfig& solver = {});

struct StepDiagnostics {
  int iterations = 0;
  double residual = 0.0;
};

struct SolveRecord {
  std::vector<FieldVector> states;  ///< u_h^0 .. u_h^N
  std::vector<StepDiagnostics> per_step;
  double wall_time = 0.0;
};

struct StepperConfig {
  SolverConfig solver;
  bool cache_weights = false;
  bool warm_start = true;
  bool check_assumptions = true;
};

/// u_h^0 as the Ritz projection of u_0.
FieldVector initial_state(const ProblemSpec& spec, const SolverConfig& solver = {});

/// b^n_1 u^0 + sum_{k=1}^{n-1} (b^n_{k+1} - b^n_k) u^k, the part of the
/// discrete fractional operator that depends on already-known states.
FieldVector history_combination(const WeightRow& row, std::span<const FieldVector> states);

/// Marches
///   [(1/tau_n + A_n b^n_n) M + A] u^n
///     = M (u^{n-1}/tau_n + A_n H^n) - k(t_n) t_n^(alpha_n - 1)/Gamma(alpha_n) (u_0, .) + (f(t_n), .)
/// with A_n = k(t_n) / Gamma(1 + alpha_n) and H^n the history combination.
class TimeStepper {
 public:
  TimeStepper(SemiDiscreteSystem system, TimeMesh mesh, VarOrder order, Kinetic kinetic,
              StepperConfig cfg = {});

  /// Record holding only u_h^0.
  SolveRecord start() const;

  /// Computes u_h^n from states 0..n-1 held in the record and appends it.
  const FieldVector& step(SolveRecord& record, int n);

  SolveRecord run();

  const SemiDiscreteSystem& system() const { return system_; }
  const TimeMesh& time_mesh() const { return mesh_; }

 private:
  SemiDiscreteSystem system_;
  TimeMesh mesh_;
  VarOrder order_;
  Kinetic kinetic_;
  StepperConfig cfg_;
  WeightTable weights_;
  SparseMatrix system_matrix_;
  bool shared_pattern_ = false;
};

const FieldVector& step(const ProblemSpec& spec, SolveRecord& record, int n, const StepperConfig& cfg = {});

SolveRecord solve_all(const ProblemSpec& spec, const StepperConfig& cfg = {});

}  // namespace vofem
