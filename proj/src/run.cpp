#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "vofem/cli.hpp"
#include "vofem/errors.hpp"

namespace vofem {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.5e", v);
  return buf;
}

std::ofstream open_output(const std::string& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream os(path, mode);
  if (!os) throw ConfigError("output: cannot open '" + path + "' for writing");
  return os;
}

template <typename T>
void put_le(std::ostream& os, T value) {
  static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);
  auto bytes = std::bit_cast<std::array<char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  os.write(bytes.data(), bytes.size());
}

Eigen::Vector3d diffusion_of(const RunConfig& cfg) {
  return {cfg.diffusion[0], cfg.diffusion[1], cfg.diffusion[2]};
}

QuadConfig quad_of(const RunConfig& cfg) {
  QuadConfig q;
  q.rel_tol = cfg.quad_tol;
  return q;
}

StepperConfig stepper_of(const RunConfig& cfg) {
  StepperConfig s;
  s.solver.rel_tol = cfg.solver_tol;
  return s;
}

void report_grading(const RunConfig& cfg, std::ostream& out) {
  out << "r=" << cfg.grading << (cfg.grading_auto ? " (auto)" : "") << "\n";
}

int run_check(const RunConfig& cfg, std::ostream& out) {
  const auto order = make_transition_order(cfg.alpha0, cfg.alpha1);
  const auto report = check_assumption_a(order, make_constant_kinetic(cfg.kinetic), cfg.horizon);
  out << (report.passed ? "PASS" : "FAIL") << "\n";
  for (const auto& cond : report.checked) {
    bool ok = true;
    for (const auto& v : report.violations) ok = ok && v.condition != cond;
    out << "  " << (ok ? "ok  " : "FAIL") << " " << cond << "\n";
  }
  for (const auto& v : report.violations)
    out << "  violation: " << v.condition << " at t=" << sci(v.t) << " value=" << sci(v.value) << "\n";
  return report.passed ? 0 : 1;
}

int run_solve(const RunConfig& cfg, std::ostream& out) {
  report_grading(cfg, out);
  const TimeMesh tmesh = build_mesh(cfg.horizon, cfg.steps, cfg.grading);
  const SpatialMesh mesh = build_box_mesh(cfg.dim, cfg.cells);
  const auto order = make_transition_order(cfg.alpha0, cfg.alpha1);
  const auto kinetic = make_constant_kinetic(cfg.kinetic);

  SolveRecord record;
  double sup = 0.0, final_error = 0.0;
  if (cfg.problem == ProblemKind::manufactured) {
    const auto problem = build_manufactured(cfg.dim, order, kinetic, diffusion_of(cfg), cfg.horizon, quad_of(cfg));
    ProblemSpec spec = problem.spec(tmesh, mesh);
    spec.load_rule = cfg.load;
    record = solve_all(spec, stepper_of(cfg));
    if (cfg.norm == ErrorNorm::l2) {
      sup = sup_l2_error(record, problem, tmesh, mesh);
      final_error = l2_error(mesh, record.states.back(),
                             [&](const Point& x) { return problem.exact(x, cfg.horizon); });
    } else {
      sup = sup_interpolant_error(record, problem, tmesh, mesh);
      const FieldVector e = problem.g(cfg.horizon) * interpolate(mesh, [&](const Point& x) {
        return problem.profile(x);
      }) - record.states.back();
      final_error = std::sqrt(e.dot(assemble_mass(mesh) * e));
    }
  } else {
    ProblemSpec spec{order, kinetic, make_diagonal_diffusion(diffusion_of(cfg)), SpatialField{}, SourceTerm{},
                     tmesh, mesh};
    record = solve_all(spec, stepper_of(cfg));
    sup = sup_l2_error(record, tmesh, mesh, [](const Point&, double) { return 0.0; });
    final_error = l2_error(mesh, record.states.back(), [](const Point&) { return 0.0; });
  }

  int iterations = 0;
  for (const auto& d : record.per_step) iterations += d.iterations;
  out << "d=" << cfg.dim << " m=" << cfg.cells << " N=" << cfg.steps << " alpha0=" << cfg.alpha0
      << " alpha1=" << cfg.alpha1 << "\n";
  out << "sup_error=" << sci(sup) << "\n";
  out << "final_error=" << sci(final_error) << "\n";
  out << "iterations=" << iterations << "\n";
  out << "wall_time=" << sci(record.wall_time) << "\n";

  if (!cfg.field_out.empty()) {
    auto os = open_output(cfg.field_out);
    write_field_text(os, mesh, record.states.back());
  }
  if (!cfg.binary_out.empty()) {
    auto os = open_output(cfg.binary_out, std::ios::out | std::ios::binary);
    write_field_binary(os, mesh, record.states.back());
  }
  return 0;
}

int run_sweep(const RunConfig& cfg, std::ostream& out) {
  report_grading(cfg, out);
  SweepPlan plan = cfg.axis == SweepAxis::time
                       ? temporal_sweep(cfg.dim, cfg.alpha0, cfg.alpha1, cfg.cells, cfg.sweep_steps, cfg.grading)
                       : spatial_sweep(cfg.dim, cfg.alpha0, cfg.alpha1, cfg.sweep_cells);
  plan.kinetic = cfg.kinetic;
  plan.diffusion = diffusion_of(cfg);
  plan.quad = quad_of(cfg);
  plan.stepper = stepper_of(cfg);
  plan.enforce_spatial_resolution = cfg.enforce_spatial;
  plan.threads = cfg.threads > 0 ? cfg.threads : threads_from_env();
  plan.norm = cfg.norm;
  plan.load_rule = cfg.load;
  const ConvergenceTable table = run_convergence(plan);
  const std::string csv = to_csv(table);
  out << csv;
  if (!cfg.csv_out.empty()) open_output(cfg.csv_out) << csv;
  if (!cfg.json_out.empty()) open_output(cfg.json_out) << to_json(table).dump(2) << "\n";
  return 0;
}

}  // namespace

void write_field_text(std::ostream& os, const SpatialMesh& mesh, const FieldVector& u_h) {
  const Eigen::VectorXd values = to_vertex_values(mesh, u_h);
  char buf[32];
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    for (int j = 0; j < mesh.dim; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g ", mesh.vertices[v](j));
      os << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g\n", values(v));
    os << buf;
  }
}

void write_field_binary(std::ostream& os, const SpatialMesh& mesh, const FieldVector& u_h) {
  const Eigen::VectorXd values = to_vertex_values(mesh, u_h);
  put_le<std::int64_t>(os, mesh.dim);
  put_le<std::int64_t>(os, mesh.cells);
  for (int v = 0; v < mesh.num_vertices(); ++v) put_le<double>(os, values(v));
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    RunConfig checked = cfg;
    validate(checked);
    switch (checked.mode) {
      case RunMode::check: return run_check(checked, out);
      case RunMode::solve: return run_solve(checked, out);
      case RunMode::convergence: return run_sweep(checked, out);
    }
  } catch (const ConfigError& e) {
    err << "vofem: " << e.what() << "\n";
    return 2;
  } catch (const SolverError& e) {
    err << "vofem: solver: " << e.what() << " (residual " << sci(e.residual) << " after " << e.iterations
        << " iterations)\n";
    return 3;
  } catch (const QuadratureError& e) {
    err << "vofem: quadrature: " << e.what() << " (estimate " << sci(e.estimate) << ")\n";
    return 4;
  } catch (const std::exception& e) {
    err << "vofem: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace vofem
