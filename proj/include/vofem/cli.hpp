#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "vofem/harness.hpp"

namespace vofem {

enum class RunMode { check, solve, convergence };
enum class ProblemKind { manufactured, zero };

/// Flat run description. Every field has a key of the same spelling in the
/// text format; to_text(parse_config(s)) reproduces the parsed value.
struct RunConfig {
  RunMode mode = RunMode::solve;
  ProblemKind problem = ProblemKind::manufactured;
  int dim = 1;
  int cells = 64;
  int steps = 16;
  bool grading_auto = true;
  double grading = 1.0;  ///< resolved value; equals auto_grading(alpha0) when grading_auto
  double alpha0 = 0.6;
  double alpha1 = 0.4;
  double kinetic = 1.0;
  std::array<double, 3> diffusion{1e-3, 1e-3, 1e-3};
  double horizon = 1.0;
  double solver_tol = 1e-11;
  double quad_tol = 1e-10;
  SweepAxis axis = SweepAxis::time;
  std::vector<int> sweep_steps;  ///< time sweeps: N values
  std::vector<int> sweep_cells;  ///< space sweeps: cells per axis, N = m^2
  bool enforce_spatial = true;
  ErrorNorm norm = ErrorNorm::l2;
  LoadRule load = LoadRule::quadrature;
  int threads = 0;  ///< 0 defers to VOFEM_THREADS
  std::string field_out;
  std::string binary_out;
  std::string csv_out;
  std::string json_out;

  bool operator==(const RunConfig&) const = default;
};

/// Key-value text, one "key=value" per line, '#' starts a comment. A document
/// whose first non-blank character is '{' is read as JSON with the same keys;
/// list values may then be arrays. Throws ConfigError naming the key.
RunConfig parse_config(std::string_view text);

/// Flag form: "key=value", "--key=value" or "--key value" tokens.
RunConfig parse_args(const std::vector<std::string>& args, RunConfig base = {});

/// Applies one key; used by both parsers.
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value);

/// Checks ranges and resolves "auto" grading; throws ConfigError.
void validate(RunConfig& cfg);

std::string to_text(const RunConfig& cfg);
nlohmann::json to_json(const RunConfig& cfg);

/// Executes the configured mode, writes artifacts, returns the exit status:
/// 0 success, 1 failed check or other error, 2 config error, 3 solver
/// failure, 4 quadrature failure.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Text field rows "x_1 ... x_d value" over all vertices (boundary included).
void write_field_text(std::ostream& os, const SpatialMesh& mesh, const FieldVector& u_h);

/// Little-endian int64 d, int64 m, then (m+1)^d float64 vertex values in
/// lexicographic order, x fastest.
void write_field_binary(std::ostream& os, const SpatialMesh& mesh, const FieldVector& u_h);

}  // namespace vofem
