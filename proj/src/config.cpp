#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "vofem/cli.hpp"
#include "vofem/errors.hpp"

namespace vofem {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad(std::string_view key, std::string_view value, std::string_view why) {
  throw ConfigError("config: key '" + std::string(key) + "' value '" + std::string(value) + "': " + std::string(why));
}

double to_double(std::string_view key, std::string_view value) {
  value = trim(value);
  // "1/32" is accepted wherever a number is
  if (auto slash = value.find('/'); slash != std::string_view::npos) {
    const double num = to_double(key, value.substr(0, slash));
    const double den = to_double(key, value.substr(slash + 1));
    if (den == 0.0) bad(key, value, "division by zero");
    return num / den;
  }
  double v = 0.0;
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, v);
  if (ec != std::errc() || ptr != end || value.empty()) bad(key, value, "expected a number");
  if (!std::isfinite(v)) bad(key, value, "must be finite");
  return v;
}

int to_int(std::string_view key, std::string_view value) {
  value = trim(value);
  int v = 0;
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, v);
  if (ec != std::errc() || ptr != end || value.empty()) bad(key, value, "expected an integer");
  return v;
}

bool to_bool(std::string_view key, std::string_view value) {
  value = trim(value);
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  bad(key, value, "expected true or false");
}

std::vector<std::string_view> split_list(std::string_view value) {
  std::vector<std::string_view> parts;
  value = trim(value);
  if (!value.empty() && value.front() == '[' && value.back() == ']') value = value.substr(1, value.size() - 2);
  while (!value.empty()) {
    const auto comma = value.find(',');
    parts.push_back(trim(value.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    value.remove_prefix(comma + 1);
  }
  return parts;
}

std::vector<int> to_int_list(std::string_view key, std::string_view value) {
  std::vector<int> out;
  for (auto part : split_list(value)) out.push_back(to_int(key, part));
  if (out.empty()) bad(key, value, "expected a comma-separated list");
  return out;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string int_list(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

const char* mode_name(RunMode m) {
  switch (m) {
    case RunMode::check: return "check";
    case RunMode::solve: return "solve";
    case RunMode::convergence: return "convergence";
  }
  return "";
}

}  // namespace

void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "mode") {
    if (value == "check") cfg.mode = RunMode::check;
    else if (value == "solve") cfg.mode = RunMode::solve;
    else if (value == "convergence") cfg.mode = RunMode::convergence;
    else bad(key, value, "expected check, solve or convergence");
  } else if (key == "problem") {
    if (value == "manufactured") cfg.problem = ProblemKind::manufactured;
    else if (value == "zero") cfg.problem = ProblemKind::zero;
    else bad(key, value, "expected manufactured or zero");
  } else if (key == "d") {
    cfg.dim = to_int(key, value);
  } else if (key == "m") {
    cfg.cells = to_int(key, value);
  } else if (key == "h") {
    const double h = to_double(key, value);
    if (!(h > 0.0)) bad(key, value, "must be positive");
    const double m = std::round(1.0 / h);
    if (std::abs(m * h - 1.0) > 1e-9) bad(key, value, "1/h must be an integer");
    cfg.cells = int(m);
  } else if (key == "N") {
    cfg.steps = to_int(key, value);
  } else if (key == "r") {
    if (value == "auto") {
      cfg.grading_auto = true;
    } else {
      cfg.grading_auto = false;
      cfg.grading = to_double(key, value);
    }
  } else if (key == "alpha0") {
    cfg.alpha0 = to_double(key, value);
  } else if (key == "alpha1") {
    cfg.alpha1 = to_double(key, value);
  } else if (key == "k") {
    cfg.kinetic = to_double(key, value);
  } else if (key == "K") {
    const auto parts = split_list(value);
    if (parts.size() == 1) {
      cfg.diffusion.fill(to_double(key, parts[0]));
    } else if (parts.size() == 3) {
      for (int j = 0; j < 3; ++j) cfg.diffusion[j] = to_double(key, parts[j]);
    } else {
      bad(key, value, "expected one value or three comma-separated values");
    }
  } else if (key == "T") {
    cfg.horizon = to_double(key, value);
  } else if (key == "solver_tol") {
    cfg.solver_tol = to_double(key, value);
  } else if (key == "quad_tol") {
    cfg.quad_tol = to_double(key, value);
  } else if (key == "axis") {
    if (value == "time") cfg.axis = SweepAxis::time;
    else if (value == "space") cfg.axis = SweepAxis::space;
    else bad(key, value, "expected time or space");
  } else if (key == "steps") {
    cfg.sweep_steps = to_int_list(key, value);
  } else if (key == "cells") {
    cfg.sweep_cells = to_int_list(key, value);
  } else if (key == "enforce_spatial") {
    cfg.enforce_spatial = to_bool(key, value);
  } else if (key == "norm") {
    if (value == "l2") cfg.norm = ErrorNorm::l2;
    else if (value == "interpolant") cfg.norm = ErrorNorm::interpolant;
    else bad(key, value, "expected l2 or interpolant");
  } else if (key == "load") {
    if (value == "quadrature") cfg.load = LoadRule::quadrature;
    else if (value == "interpolated") cfg.load = LoadRule::interpolated;
    else bad(key, value, "expected quadrature or interpolated");
  } else if (key == "threads") {
    cfg.threads = to_int(key, value);
  } else if (key == "field") {
    cfg.field_out = std::string(value);
  } else if (key == "binary") {
    cfg.binary_out = std::string(value);
  } else if (key == "csv") {
    cfg.csv_out = std::string(value);
  } else if (key == "json") {
    cfg.json_out = std::string(value);
  } else {
    throw ConfigError("config: unknown key '" + std::string(key) + "'");
  }
}

void validate(RunConfig& cfg) {
  auto fail = [](const std::string& key, const std::string& why) {
    throw ConfigError("config: key '" + key + "': " + why);
  };
  if (cfg.dim < 1 || cfg.dim > 3) fail("d", "must be 1, 2 or 3");
  if (cfg.cells < 2) fail("m", "need at least 2 cells per axis");
  if (cfg.steps < 1) fail("N", "need at least one time step");
  if (!(cfg.alpha0 > 0.0 && cfg.alpha0 <= 1.0)) fail("alpha0", "must lie in (0, 1]");
  if (!(cfg.alpha1 > 0.0 && cfg.alpha1 <= 1.0)) fail("alpha1", "must lie in (0, 1]");
  if (!(cfg.kinetic > 0.0)) fail("k", "must be positive");
  for (int j = 0; j < 3; ++j)
    if (!(cfg.diffusion[j] > 0.0)) fail("K", "diagonal entries must be positive");
  if (!(cfg.horizon > 0.0 && cfg.horizon <= 1.0)) fail("T", "must lie in (0, 1], where the order family is defined");
  if (!(cfg.solver_tol > 0.0 && cfg.solver_tol < 1.0)) fail("solver_tol", "must lie in (0, 1)");
  if (!(cfg.quad_tol > 0.0 && cfg.quad_tol < 1.0)) fail("quad_tol", "must lie in (0, 1)");
  if (cfg.threads < 0) fail("threads", "must be non-negative");
  if (cfg.grading_auto) cfg.grading = auto_grading(cfg.alpha0);
  if (!(cfg.grading >= 1.0)) fail("r", "grading must be at least 1");

  if (cfg.mode == RunMode::convergence) {
    if (cfg.problem != ProblemKind::manufactured) fail("problem", "convergence studies need the manufactured problem");
    if (cfg.horizon != 1.0) fail("T", "convergence studies run on [0, 1]");
    const auto& list = cfg.axis == SweepAxis::time ? cfg.sweep_steps : cfg.sweep_cells;
    const char* key = cfg.axis == SweepAxis::time ? "steps" : "cells";
    if (list.size() < 2) fail(key, "a sweep needs at least two values");
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (list[i] < (cfg.axis == SweepAxis::time ? 1 : 2)) fail(key, "values out of range");
      if (i && list[i] <= list[i - 1]) fail(key, "values must increase");
    }
  }
}

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  const auto body = trim(text);
  if (!body.empty() && body.front() == '{') {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(std::string("config: malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config: JSON document must be an object");
    for (const auto& [key, value] : doc.items()) {
      std::string flat;
      if (value.is_string()) {
        flat = value.get<std::string>();
      } else if (value.is_array()) {
        for (std::size_t i = 0; i < value.size(); ++i) {
          if (!value[i].is_number()) bad(key, value.dump(), "list entries must be numbers");
          flat += (i ? "," : "") + value[i].dump();
        }
      } else if (value.is_number() || value.is_boolean()) {
        flat = value.dump();
      } else {
        bad(key, value.dump(), "unsupported JSON value");
      }
      apply_setting(cfg, key, flat);
    }
  } else {
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::string_view view = line;
      if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
      view = trim(view);
      if (view.empty()) continue;
      const auto eq = view.find('=');
      if (eq == std::string_view::npos)
        throw ConfigError("config: line " + std::to_string(lineno) + ": expected key=value");
      apply_setting(cfg, view.substr(0, eq), view.substr(eq + 1));
    }
  }
  validate(cfg);
  return cfg;
}

RunConfig parse_args(const std::vector<std::string>& args, RunConfig base) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string_view tok = args[i];
    const bool dashed = tok.starts_with("--");
    if (dashed) tok.remove_prefix(2);
    const auto eq = tok.find('=');
    if (eq != std::string_view::npos) {
      apply_setting(base, tok.substr(0, eq), tok.substr(eq + 1));
    } else if (dashed && i + 1 < args.size()) {
      apply_setting(base, tok, args[++i]);
    } else {
      throw ConfigError("config: argument '" + args[i] + "' is not of the form key=value");
    }
  }
  validate(base);
  return base;
}

std::string to_text(const RunConfig& cfg) {
  std::ostringstream out;
  out << "mode=" << mode_name(cfg.mode) << "\n";
  out << "problem=" << (cfg.problem == ProblemKind::manufactured ? "manufactured" : "zero") << "\n";
  out << "d=" << cfg.dim << "\n";
  out << "m=" << cfg.cells << "\n";
  out << "N=" << cfg.steps << "\n";
  out << "r=" << (cfg.grading_auto ? std::string("auto") : num(cfg.grading)) << "\n";
  out << "alpha0=" << num(cfg.alpha0) << "\n";
  out << "alpha1=" << num(cfg.alpha1) << "\n";
  out << "k=" << num(cfg.kinetic) << "\n";
  out << "K=" << num(cfg.diffusion[0]) << "," << num(cfg.diffusion[1]) << "," << num(cfg.diffusion[2]) << "\n";
  out << "T=" << num(cfg.horizon) << "\n";
  out << "solver_tol=" << num(cfg.solver_tol) << "\n";
  out << "quad_tol=" << num(cfg.quad_tol) << "\n";
  out << "axis=" << (cfg.axis == SweepAxis::time ? "time" : "space") << "\n";
  if (!cfg.sweep_steps.empty()) out << "steps=" << int_list(cfg.sweep_steps) << "\n";
  if (!cfg.sweep_cells.empty()) out << "cells=" << int_list(cfg.sweep_cells) << "\n";
  out << "enforce_spatial=" << (cfg.enforce_spatial ? "true" : "false") << "\n";
  out << "norm=" << (cfg.norm == ErrorNorm::l2 ? "l2" : "interpolant") << "\n";
  out << "load=" << (cfg.load == LoadRule::quadrature ? "quadrature" : "interpolated") << "\n";
  out << "threads=" << cfg.threads << "\n";
  if (!cfg.field_out.empty()) out << "field=" << cfg.field_out << "\n";
  if (!cfg.binary_out.empty()) out << "binary=" << cfg.binary_out << "\n";
  if (!cfg.csv_out.empty()) out << "csv=" << cfg.csv_out << "\n";
  if (!cfg.json_out.empty()) out << "json=" << cfg.json_out << "\n";
  return out.str();
}

nlohmann::json to_json(const RunConfig& cfg) {
  nlohmann::json doc = nlohmann::json::object();
  std::istringstream in(to_text(cfg));
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    doc[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return doc;
}

}  // namespace vofem
