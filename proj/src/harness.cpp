#include "vofem/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <numbers>
#include <sstream>
#include <thread>

#include "vofem/errors.hpp"

namespace vofem {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.5e", v);
  return buf;
}

std::string general(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

template <typename T, typename F>
std::string joined(const std::vector<T>& values, F&& fmt) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + fmt(values[i]);
  return out;
}

}  // namespace

double ManufacturedProblem::g(double t) const { return guarded_pow(t, order(t)); }

double ManufacturedProblem::g_prime(double t) const {
  if (t <= 0.0) return order.alpha0() == 1.0 ? 1.0 : std::numeric_limits<double>::infinity();
  const double a = order(t);
  return std::exp(a * std::log(t)) * (order.derivative(t) * std::log(t) + a / t);
}

double ManufacturedProblem::profile(const Point& x) const {
  double v = 1.0;
  for (int j = 0; j < dim; ++j) v *= std::sin(kTwoPi * x(j));
  return v;
}

Eigen::Vector3d ManufacturedProblem::profile_gradient(const Point& x) const {
  Eigen::Vector3d grad = Eigen::Vector3d::Zero();
  for (int j = 0; j < dim; ++j) {
    double v = kTwoPi * std::cos(kTwoPi * x(j));
    for (int i = 0; i < dim; ++i)
      if (i != j) v *= std::sin(kTwoPi * x(i));
    grad(j) = v;
  }
  return grad;
}

double ManufacturedProblem::caputo_factor(double t) const {
  ScalarFn fn{[this](double s) { return g(s); }, [this](double s) { return g_prime(s); }};
  return caputo_vo(fn, order, t, quad);
}

double ManufacturedProblem::rl_factor(double t) const {
  ScalarFn fn{[this](double s) { return g(s); }, [this](double s) { return g_prime(s); }};
  return riemann_liouville_vo(fn, order, t, quad);
}

double ManufacturedProblem::source_factor(double t) const {
  return g_prime(t) + kinetic(t) * rl_factor(t) + lambda * g(t);
}

ManufacturedProblem::NodeFactors ManufacturedProblem::factors(const TimeMesh& mesh) const {
  NodeFactors out;
  const int N = mesh.steps;
  out.t = mesh.nodes;
  out.caputo = Eigen::VectorXd::Zero(N + 1);
  out.rl = Eigen::VectorXd::Zero(N + 1);
  out.source = Eigen::VectorXd::Zero(N + 1);
  for (int n = 1; n <= N; ++n) {
    const double t = mesh.t(n);
    out.caputo(n) = caputo_factor(t);
    // g(0) = 0, so the initial-value correction vanishes
    out.rl(n) = out.caputo(n) + g(0.0) * guarded_pow(t, order(t) - 1.0) / std::tgamma(order(t));
    out.source(n) = g_prime(t) + kinetic(t) * out.rl(n) + lambda * g(t);
  }
  return out;
}

ProblemSpec ManufacturedProblem::spec(const TimeMesh& time_mesh, const SpatialMesh& space_mesh) const {
  if (space_mesh.dim != dim) throw DomainError("ManufacturedProblem: mesh dimension mismatch");
  auto cached = std::make_shared<const NodeFactors>(factors(time_mesh));
  auto self = std::make_shared<const ManufacturedProblem>(*this);
  TimeFn time_factor = [cached, self](double t) {
    const auto* begin = cached->t.data();
    const auto* end = begin + cached->t.size();
    const auto* it = std::lower_bound(begin, end, t);
    if (it != end && *it == t) return cached->source(it - begin);
    return self->source_factor(t);
  };
  SourceTerm source;
  source.separable.push_back({time_factor, [self](const Point& x) { return self->profile(x); }});
  return ProblemSpec{order, kinetic, make_diagonal_diffusion(diffusion), SpatialField{}, std::move(source),
                     time_mesh, space_mesh};
}

ManufacturedProblem build_manufactured(int dim, VarOrder order, Kinetic kinetic, const Eigen::Vector3d& diffusion,
                                       double horizon, const QuadConfig& quad) {
  if (dim < 1 || dim > 3) throw DomainError("build_manufactured: dimension must be 1, 2 or 3");
  validate(quad);
  if (!(order.alpha0() > 0.0)) throw DomainError("build_manufactured: alpha(0) must be positive");
  ManufacturedProblem p{dim, std::move(order), std::move(kinetic), diffusion, horizon, 0.0, quad};
  p.lambda = kTwoPi * kTwoPi * diffusion.head(dim).sum();
  return p;
}

double sup_l2_error(const SolveRecord& record, const TimeMesh& time_mesh, const SpatialMesh& space_mesh,
                    const std::function<double(const Point&, double)>& exact) {
  if (record.states.size() != std::size_t(time_mesh.steps) + 1)
    throw LengthError("sup_l2_error: record does not match the time mesh");
  double worst = 0.0;
  for (int n = 1; n <= time_mesh.steps; ++n) {
    const double t = time_mesh.t(n);
    worst = std::max(worst, l2_error(space_mesh, record.states[n], [&](const Point& x) { return exact(x, t); }));
  }
  return worst;
}

double sup_l2_error(const SolveRecord& record, const ManufacturedProblem& problem, const TimeMesh& time_mesh,
                    const SpatialMesh& space_mesh) {
  if (record.states.size() != std::size_t(time_mesh.steps) + 1)
    throw LengthError("sup_l2_error: record does not match the time mesh");
  auto profile = [&](const Point& x) { return problem.profile(x); };
  const FieldVector cross = assemble_load(space_mesh, profile);
  const double norm_sq = std::pow(l2_error(space_mesh, FieldVector::Zero(space_mesh.num_dofs()), profile), 2);
  const SparseMatrix M = assemble_mass(space_mesh);
  double worst = 0.0;
  for (int n = 1; n <= time_mesh.steps; ++n) {
    const FieldVector& c = record.states[n];
    const double gn = problem.g(time_mesh.t(n));
    const double sq = gn * gn * norm_sq - 2.0 * gn * cross.dot(c) + c.dot(M * c);
    worst = std::max(worst, std::sqrt(std::max(sq, 0.0)));
  }
  return worst;
}

double sup_interpolant_error(const SolveRecord& record, const ManufacturedProblem& problem,
                             const TimeMesh& time_mesh, const SpatialMesh& space_mesh) {
  if (record.states.size() != std::size_t(time_mesh.steps) + 1)
    throw LengthError("sup_interpolant_error: record does not match the time mesh");
  const FieldVector nodal = interpolate(space_mesh, [&](const Point& x) { return problem.profile(x); });
  const SparseMatrix M = assemble_mass(space_mesh);
  double worst = 0.0;
  for (int n = 1; n <= time_mesh.steps; ++n) {
    const FieldVector e = problem.g(time_mesh.t(n)) * nodal - record.states[n];
    worst = std::max(worst, std::sqrt(e.dot(M * e)));
  }
  return worst;
}

std::vector<double> estimate_rate(const std::vector<double>& errors, const std::vector<double>& ratios) {
  if (errors.size() != ratios.size() + 1) throw LengthError("estimate_rate: need one more error than ratios");
  for (double e : errors)
    if (!(e > 0.0)) throw DomainError("estimate_rate: errors must be positive");
  std::vector<double> rates;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    if (!(ratios[i] > 0.0) || ratios[i] == 1.0) throw DomainError("estimate_rate: refinement ratio must differ from 1");
    rates.push_back(std::log(errors[i] / errors[i + 1]) / std::log(ratios[i]));
  }
  return rates;
}

SweepPlan temporal_sweep(int dim, double alpha0, double alpha1, int cells, const std::vector<int>& steps,
                         double grading) {
  SweepPlan plan;
  plan.dim = dim;
  plan.alpha0 = alpha0;
  plan.alpha1 = alpha1;
  plan.axis = SweepAxis::time;
  const double r = grading == 0.0 ? auto_grading(alpha0) : grading;
  for (int N : steps) plan.points.push_back({N, cells, r});
  return plan;
}

SweepPlan spatial_sweep(int dim, double alpha0, double alpha1, const std::vector<int>& cells) {
  SweepPlan plan;
  plan.dim = dim;
  plan.alpha0 = alpha0;
  plan.alpha1 = alpha1;
  plan.axis = SweepAxis::space;
  for (int m : cells) plan.points.push_back({m * m, m, 1.0});
  return plan;
}

ConvergenceTable run_convergence(const SweepPlan& plan) {
  if (plan.points.empty()) throw DomainError("run_convergence: empty sweep");
  for (std::size_t i = 1; i < plan.points.size(); ++i) {
    const auto& a = plan.points[i - 1];
    const auto& b = plan.points[i];
    const bool refined = plan.axis == SweepAxis::time ? b.steps != a.steps : b.cells != a.cells;
    if (!refined) throw DomainError("run_convergence: sweep does not refine along its axis");
    if (plan.axis == SweepAxis::time && b.cells != a.cells)
      throw DomainError("run_convergence: time sweeps must hold the space mesh fixed");
  }

  auto problem = build_manufactured(plan.dim, make_transition_order(plan.alpha0, plan.alpha1),
                                    make_constant_kinetic(plan.kinetic), plan.diffusion, plan.horizon, plan.quad);
  if (plan.horizon != 1.0) throw DomainError("run_convergence: the transition order family lives on [0, 1]");

  std::map<int, SpatialMesh> meshes;
  for (const auto& p : plan.points)
    if (!meshes.count(p.cells)) meshes.emplace(p.cells, build_box_mesh(plan.dim, p.cells));

  // Ritz error of u(T): the spatial part a temporal sweep cannot remove
  std::map<int, double> spatial;
  if (plan.axis == SweepAxis::time) {
    for (const auto& [cells, mesh] : meshes) {
      const auto K = make_diagonal_diffusion(plan.diffusion);
      SpatialField field{[&](const Point& x) { return problem.profile(x); },
                         [&](const Point& x) { return problem.profile_gradient(x); }};
      const FieldVector proj = ritz_project(mesh, K, field, plan.stepper.solver);
      spatial[cells] = std::abs(problem.g(plan.horizon)) *
                       l2_error(mesh, proj, [&](const Point& x) { return problem.profile(x); });
    }
  }

  ConvergenceTable table;
  table.axis = plan.axis;
  table.dim = plan.dim;
  table.alpha0 = plan.alpha0;
  table.alpha1 = plan.alpha1;
  table.label = plan.label;
  table.norm = plan.norm;
  table.load_rule = plan.load_rule;
  table.rows.resize(plan.points.size());

  auto run_point = [&](std::size_t i) {
    const auto& p = plan.points[i];
    const auto& mesh = meshes.at(p.cells);
    const TimeMesh tmesh = build_mesh(plan.horizon, p.steps, p.grading);
    ProblemSpec spec = problem.spec(tmesh, mesh);
    spec.load_rule = plan.load_rule;
    const SolveRecord record = solve_all(spec, plan.stepper);
    auto& row = table.rows[i];
    row.steps = p.steps;
    row.cells = p.cells;
    row.h = mesh.h;
    row.grading = p.grading;
    row.error = plan.norm == ErrorNorm::l2 ? sup_l2_error(record, problem, tmesh, mesh)
                                           : sup_interpolant_error(record, problem, tmesh, mesh);
    row.wall_time = record.wall_time;
    row.spatial_estimate = spatial.count(p.cells) ? spatial.at(p.cells) : 0.0;
  };

  const int threads = std::max(1, std::min<int>(plan.threads, int(plan.points.size())));
  if (threads == 1) {
    for (std::size_t i = 0; i < plan.points.size(); ++i) run_point(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> failures(plan.points.size());
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < plan.points.size(); i = next++) {
          try {
            run_point(i);
          } catch (...) {
            failures[i] = std::current_exception();
          }
        }
      });
    for (auto& th : pool) th.join();
    for (auto& f : failures)
      if (f) std::rethrow_exception(f);
  }

  std::vector<double> errors, ratios;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    errors.push_back(table.rows[i].error);
    if (i == 0) continue;
    const auto& a = table.rows[i - 1];
    const auto& b = table.rows[i];
    ratios.push_back(plan.axis == SweepAxis::time ? double(b.steps) / a.steps : double(b.cells) / a.cells);
  }
  const auto rates = estimate_rate(errors, ratios);
  for (std::size_t i = 0; i < rates.size(); ++i) table.rows[i + 1].rate = rates[i];

  if (plan.axis == SweepAxis::time && plan.enforce_spatial_resolution) {
    for (const auto& row : table.rows)
      if (row.spatial_estimate > 0.1 * row.error)
        throw DomainError("run_convergence: spatial error estimate " + sci(row.spatial_estimate) +
                          " exceeds 10% of the total error " + sci(row.error) + " at N = " +
                          std::to_string(row.steps) + "; refine the space mesh");
  }
  return table;
}

std::string to_csv(const ConvergenceTable& table) {
  std::vector<double> gradings, hs;
  std::vector<int> steps;
  for (const auto& row : table.rows) {
    if (std::find(gradings.begin(), gradings.end(), row.grading) == gradings.end()) gradings.push_back(row.grading);
    if (std::find(hs.begin(), hs.end(), row.h) == hs.end()) hs.push_back(row.h);
    steps.push_back(row.steps);
  }
  std::ostringstream out;
  if (!table.label.empty()) out << "# label=" << table.label << "\n";
  out << "# axis=" << (table.axis == SweepAxis::time ? "time" : "space") << "\n";
  out << "# alpha0=" << general(table.alpha0) << "\n";
  out << "# alpha1=" << general(table.alpha1) << "\n";
  out << "# r=" << joined(gradings, general) << "\n";
  out << "# d=" << table.dim << "\n";
  out << "# h=" << joined(hs, general) << "\n";
  out << "# N=" << joined(steps, [](int n) { return std::to_string(n); }) << "\n";
  out << "# norm=" << (table.norm == ErrorNorm::l2 ? "l2" : "interpolant") << "\n";
  out << "# load=" << (table.load_rule == LoadRule::quadrature ? "quadrature" : "interpolated") << "\n";
  out << (table.axis == SweepAxis::time ? "N" : "h") << ",error,rate\n";
  for (const auto& row : table.rows) {
    out << (table.axis == SweepAxis::time ? std::to_string(row.steps) : sci(row.h)) << "," << sci(row.error) << ",";
    if (row.rate) out << sci(*row.rate);
    out << "\n";
  }
  return out.str();
}

nlohmann::json to_json(const ConvergenceTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json r{{"N", row.steps},     {"cells", row.cells}, {"h", row.h},
                     {"r", row.grading},   {"error", row.error}, {"wall_time", row.wall_time}};
    r["rate"] = row.rate ? nlohmann::json(*row.rate) : nlohmann::json(nullptr);
    if (table.axis == SweepAxis::time) r["spatial_estimate"] = row.spatial_estimate;
    rows.push_back(std::move(r));
  }
  return {{"label", table.label},
          {"axis", table.axis == SweepAxis::time ? "time" : "space"},
          {"d", table.dim},
          {"alpha0", table.alpha0},
          {"alpha1", table.alpha1},
          {"norm", table.norm == ErrorNorm::l2 ? "l2" : "interpolant"},
          {"load", table.load_rule == LoadRule::quadrature ? "quadrature" : "interpolated"},
          {"rate_symbol", table.axis == SweepAxis::time ? "kappa" : "gamma"},
          {"rows", std::move(rows)}};
}

nlohmann::json to_json(const std::vector<ConvergenceTable>& tables) {
  nlohmann::json columns = nlohmann::json::array();
  for (const auto& t : tables) columns.push_back(to_json(t));
  return {{"columns", std::move(columns)}};
}

int threads_from_env() {
  const char* env = std::getenv("VOFEM_THREADS");
  if (!env) return 1;
  const int n = std::atoi(env);
  return n > 0 ? n : 1;
}

}  // namespace vofem
