#pragma once

// JSON problem configuration:
//
// {
//   "schema": "dpvi-config/1",
//   "mesh":       {"dim": 1, "n": 64, "gamma": "0"},
//   "exponents":  {"p": "2", "q": "3", "mu": "0"},
//   "constraint": {"kind": "obstacle", "psi": "-0.5", "c_psi": 0.1},
//   "f":          {"f1": "8", "f2": "8"},
//   "f_gamma":    {"f1": "0", "f2": "0"},
//   "j":          {"j1": "...", "j2": "...", "r_min": -2, "r_max": 2,
//                  "s_min": -2, "s_max": 2},
//   "bounds":     {"k1": "1", "k2": "-1", "margin": 0.001}
//              or {"u_lower": "...", "u_upper": "..."},
//   "solver":     {"tol": 1e-9, "max_iter": 200, "selection": "lower",
//                  "seed": 0, "max_outer": 50, "eps": 1e-8},
//   "norm":       {"u": "1"},
//   "coercivity": {"radii": [1, 2, 4, 8], "samples": 20, "u0": "0"}
// }
//
// Expressions may be given as strings or numbers. Unknown keys are errors
// at every level.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpvi/extremal.hpp"
#include "dpvi/visolve.hpp"

namespace dpvi {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kConfigSchema = "dpvi-config/1";

struct IntervalSpec {
  std::string f1, f2;
};

struct TwoArgSpec {
  std::string j1, j2;
  FieldLocation domain = FieldLocation::interior;
  double r_min = -2.0, r_max = 2.0, s_min = -2.0, s_max = 2.0;
};

struct BoundsSpec {
  bool constructed = true;  // k1/k2 recipe, otherwise explicit functions
  std::string k1, k2;
  double margin = 1e-3;
  std::string u_lower, u_upper;
};

struct ProblemConfig {
  int dim = 1;
  int n = 16;
  std::string gamma = "0";
  std::string p = "2", q = "3", mu = "0";
  ConstraintKind constraint = ConstraintKind::whole_space;
  std::string psi, psi_hi;  // obstacle / box lower, box upper
  double c_psi = 0.0;
  std::optional<IntervalSpec> f, f_gamma;
  std::optional<TwoArgSpec> j;
  std::optional<BoundsSpec> bounds;
  double tol = 1e-9;
  int max_iter = 200;
  SelectionRule selection = SelectionRule::lower;
  std::uint64_t seed = 0;
  int max_outer = 50;
  double eps = 1e-8;
  std::string norm_u = "1";
  std::vector<double> radii{1.0, 2.0, 4.0, 8.0};
  int samples = 20;
  std::string u0 = "0";

  SolveOptions solve_options() const;
};

/// Parses and validates (schema, keys, expression syntax).
ProblemConfig parse_config(const std::string& json_text);
ProblemConfig load_config(const std::string& path);

struct BuiltProblem {
  MeshPtr mesh;
  ExponentData exponents;
  VIProblem problem;
  std::optional<TwoArgIntervalMultifunction> j;
};

/// Builds mesh, exponents and the problem. Exponent hypotheses are checked
/// and violations raise ConfigError.
BuiltProblem build_problem(const ProblemConfig& cfg);

/// Ordered interval from the bounds block (constructed or explicit). With a
/// two-argument j, explicit bounds are certified against s -> j(x, s, s).
OrderedInterval build_interval(const ProblemConfig& cfg, const BuiltProblem& bp);

}  // namespace dpvi
