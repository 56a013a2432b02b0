#include "vofem/stepper.hpp"

#include <chrono>
#include <cmath>
#include <memory>
#include <string>

#include "vofem/errors.hpp"

namespace vofem {

namespace {

bool same_pattern(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.nonZeros() != b.nonZeros()) return false;
  if (!a.isCompressed() || !b.isCompressed()) return false;
  for (Eigen::Index i = 0; i <= a.outerSize(); ++i)
    if (a.outerIndexPtr()[i] != b.outerIndexPtr()[i]) return false;
  for (Eigen::Index i = 0; i < a.nonZeros(); ++i)
    if (a.innerIndexPtr()[i] != b.innerIndexPtr()[i]) return false;
  return true;
}

void assert_assumptions(const VarOrder& order, const Kinetic& kinetic, double horizon) {
  const auto report = check_assumption_a(order, kinetic, horizon);
  if (!report.passed) {
    const auto& v = report.violations.front();
    throw DomainError("problem violates assumption '" + v.condition + "' at t = " + std::to_string(v.t) +
                      " (value " + std::to_string(v.value) + ")");
  }
}

}  // namespace

double SourceTerm::operator()(const Point& x, double t) const {
  double value = general ? general(x, t) : 0.0;
  for (const auto& part : separable) value += part.time(t) * part.profile(x);
  return value;
}

FieldVector initial_state(const ProblemSpec& spec, const SolverConfig& solver) {
  if (!spec.initial.value) return FieldVector::Zero(spec.space_mesh.num_dofs());
  return ritz_project(spec.space_mesh, spec.diffusion, spec.initial, solver);
}

SemiDiscreteSystem discretize(const ProblemSpec& spec, const SolverConfig& solver) {
  const auto& mesh = spec.space_mesh;
  SemiDiscreteSystem sys;
  sys.mass = assemble_mass(mesh);
  sys.stiffness = assemble_stiffness(mesh, spec.diffusion);
  sys.initial = initial_state(spec, solver);
  const bool nodal = spec.load_rule == LoadRule::interpolated;
  auto load_of = [nodal, mass = sys.mass](const SpatialMesh& m, const SpatialFn& g) -> FieldVector {
    return nodal ? FieldVector(mass * interpolate(m, g)) : assemble_load(m, g);
  };
  sys.initial_load = spec.initial.value ? load_of(mesh, spec.initial.value) : FieldVector::Zero(mesh.num_dofs());

  std::vector<std::pair<TimeFn, FieldVector>> parts;
  for (const auto& part : spec.source.separable) parts.emplace_back(part.time, load_of(mesh, part.profile));
  auto general = spec.source.general;
  if (!parts.empty() || general) {
    auto owned = general ? std::make_shared<const SpatialMesh>(mesh) : nullptr;
    sys.source_load = [parts = std::move(parts), general, owned, load_of, dofs = mesh.num_dofs()](int, double t) {
      FieldVector load = general ? load_of(*owned, [&](const Point& x) { return general(x, t); })
                                 : FieldVector::Zero(dofs);
      for (const auto& [time, profile] : parts) load += time(t) * profile;
      return load;
    };
  }
  return sys;
}

FieldVector history_combination(const WeightRow& row, std::span<const FieldVector> states) {
  const int n = row.n;
  if (states.size() < std::size_t(n)) throw LengthError("history_combination: need states 0..n-1");
  FieldVector hist = row.b(0) * states[0];
  for (int k = 1; k < n; ++k) hist += (row.b(k) - row.b(k - 1)) * states[k];
  return hist;
}

TimeStepper::TimeStepper(SemiDiscreteSystem system, TimeMesh mesh, VarOrder order, Kinetic kinetic,
                         StepperConfig cfg)
    : system_(std::move(system)),
      mesh_(std::move(mesh)),
      order_(std::move(order)),
      kinetic_(std::move(kinetic)),
      cfg_(cfg),
      weights_(mesh_, order_, cfg.cache_weights) {
  const auto n = system_.mass.rows();
  if (system_.stiffness.rows() != n || system_.initial.size() != n || system_.initial_load.size() != n)
    throw LengthError("TimeStepper: inconsistent system dimensions");
  system_.mass.makeCompressed();
  system_.stiffness.makeCompressed();
  shared_pattern_ = same_pattern(system_.mass, system_.stiffness);
  system_matrix_ = shared_pattern_ ? system_.mass : SparseMatrix(system_.mass + system_.stiffness);
}

SolveRecord TimeStepper::start() const {
  SolveRecord record;
  record.states.reserve(mesh_.steps + 1);
  record.states.push_back(system_.initial);
  return record;
}

const FieldVector& TimeStepper::step(SolveRecord& record, int n) {
  if (n < 1 || n > mesh_.steps) throw IndexError("step: n = " + std::to_string(n) + " outside 1..N");
  if (record.states.size() != std::size_t(n)) throw LengthError("step: record must hold exactly states 0..n-1");

  const WeightRow& row = weights_.row(n);
  if (row.b.size() != n) throw LengthError("step: weight row length mismatch");
  const double tn = mesh_.t(n), tau = mesh_.tau(n);
  const double alpha = row.alpha_n;
  const double k = kinetic_(tn);
  const double bnn = row.b(n - 1);
  if (!(k > 0.0) || !(bnn > 0.0)) throw DomainError("step: system matrix would not be positive definite");
  const double an = k / std::tgamma(1.0 + alpha);
  const double shift = 1.0 / tau + an * bnn;

  if (shared_pattern_) {
    const auto nnz = system_matrix_.nonZeros();
    const double* m = system_.mass.valuePtr();
    const double* a = system_.stiffness.valuePtr();
    double* s = system_matrix_.valuePtr();
    for (Eigen::Index i = 0; i < nnz; ++i) s[i] = shift * m[i] + a[i];
  } else {
    system_matrix_ = shift * system_.mass + system_.stiffness;
  }

  FieldVector combo = history_combination(row, record.states);
  combo *= an;
  combo += record.states[n - 1] / tau;
  FieldVector rhs = system_.mass * combo;
  const double initial_weight = k * guarded_pow(tn, alpha - 1.0) / std::tgamma(alpha);
  rhs -= initial_weight * system_.initial_load;
  if (system_.source_load) rhs += system_.source_load(n, tn);

  const FieldVector* guess = cfg_.warm_start ? &record.states[n - 1] : nullptr;
  auto result = linear_solve(system_matrix_, rhs, cfg_.solver, guess);
  record.per_step.push_back({result.iterations, result.residual});
  record.states.push_back(std::move(result.x));
  return record.states.back();
}

SolveRecord TimeStepper::run() {
  const auto start_time = std::chrono::steady_clock::now();
  SolveRecord record = start();
  for (int n = 1; n <= mesh_.steps; ++n) step(record, n);
  record.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();
  return record;
}

const FieldVector& step(const ProblemSpec& spec, SolveRecord& record, int n, const StepperConfig& cfg) {
  TimeStepper stepper(discretize(spec, cfg.solver), spec.time_mesh, spec.order, spec.kinetic, cfg);
  return stepper.step(record, n);
}

SolveRecord solve_all(const ProblemSpec& spec, const StepperConfig& cfg) {
  if (cfg.check_assumptions) assert_assumptions(spec.order, spec.kinetic, spec.time_mesh.horizon);
  const auto start_time = std::chrono::steady_clock::now();
  TimeStepper stepper(discretize(spec, cfg.solver), spec.time_mesh, spec.order, spec.kinetic, cfg);
  SolveRecord record = stepper.run();
  record.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();
  return record;
}

}  // namespace vofem
