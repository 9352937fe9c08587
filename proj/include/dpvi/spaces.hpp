#pragma once

// Variable-exponent data, modulars and Luxemburg norms.

#include <string>
#include <vector>

#include "dpvi/mesh.hpp"

namespace dpvi {

/// p, q, mu sampled at the interior quadrature points of one mesh.
struct ExponentData {
  MeshPtr mesh;
  int dimension = 1;
  QuadratureField p, q, mu;
  QuadratureField p_star;   // N p / (N - p), +inf when p >= N
  QuadratureField p_lower;  // (N - 1) p / (N - p), +inf when p >= N
  double p_min = 0.0, p_max = 0.0, q_min = 0.0, q_max = 0.0;

  static ExponentData sample(const MeshPtr& mesh, const Expr& p, const Expr& q,
                             const Expr& mu);
  static ExponentData constant(const MeshPtr& mesh, double p, double q,
                               double mu);
};

struct ExponentViolation {
  std::string condition;  // e.g. "p < N", "q < p*"
  std::size_t quad_index = 0;
  Point location;
  double lhs = 0.0, rhs = 0.0;
};

struct ExponentReport {
  std::vector<ExponentViolation> violations;
  bool holds() const { return violations.empty(); }
};

/// Pointwise check of 1 < p < N, p < q < p*, mu >= 0 at quadrature points.
ExponentReport validate_exponents(const ExponentData& ed);

enum class ModularKind {
  lebesgue_H,   // int |u|^p + mu |u|^q
  sobolev_H,    // the same on grad u, plus the value terms
  variable_lp,  // int |u|^r, r supplied separately
  weighted_lq,  // int mu |u|^q (seminorm modular)
};

const char* to_string(ModularKind kind);

struct Modular {
  ModularKind kind = ModularKind::lebesgue_H;
  QuadratureField r;  // variable_lp only

  static Modular lebesgue() { return {ModularKind::lebesgue_H, {}}; }
  static Modular sobolev() { return {ModularKind::sobolev_H, {}}; }
  static Modular weighted() { return {ModularKind::weighted_lq, {}}; }
  static Modular variable(QuadratureField r) {
    return {ModularKind::variable_lp, std::move(r)};
  }
};

/// Quadrature value of the modular of `scale * u`.
double modular(const Modular& m, const ExponentData& ed, const FeFunction& u,
               double scale = 1.0);

/// inf{lambda > 0 : modular(u / lambda) <= 1} by bracketing and bisection.
/// For weighted_lq the result is only a seminorm and may be 0 for u != 0.
double luxemburg_norm(const Modular& m, const ExponentData& ed,
                      const FeFunction& u, double tol = 1e-10);

}  // namespace dpvi
