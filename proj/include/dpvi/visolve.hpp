#pragma once

// Discrete multi-valued variational inequalities
//   0 in Au + dI_K(u) + F(u) + F_Gamma(u)
// on P1 spaces: constraint sets, the active-set Newton solver, residuals,
// a sampling probe of the coercivity condition and the auxiliary
// (truncated + penalized) problem built from an ordered pair.

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "dpvi/mesh.hpp"
#include "dpvi/multifun.hpp"
#include "dpvi/operator.hpp"

namespace dpvi {

enum class ConstraintKind { whole_space, obstacle, box };

const char* to_string(ConstraintKind kind);

/// K inside the Gamma0-Dirichlet subspace. Bounds are nodal.
struct ConstraintSet {
  ConstraintKind kind = ConstraintKind::whole_space;
  FeFunction lo;  // obstacle psi, or box lower bound
  FeFunction hi;  // box upper bound

  static ConstraintSet whole_space() { return {}; }
  static ConstraintSet obstacle(FeFunction psi);
  static ConstraintSet box(FeFunction lo, FeFunction hi);

  bool has_lower() const { return kind != ConstraintKind::whole_space; }
  bool has_upper() const { return kind == ConstraintKind::box; }
  double lower(std::size_t i) const {
    return has_lower() ? lo[i] : -std::numeric_limits<double>::infinity();
  }
  double upper(std::size_t i) const {
    return has_upper() ? hi[i] : std::numeric_limits<double>::infinity();
  }

  /// Nodal projection: Dirichlet nodes to 0, others clamped to the bounds.
  FeFunction project(const FeFunction& u) const;
  /// Largest nodal violation of u in K (0 when feasible).
  double infeasibility(const FeFunction& u) const;
  /// Throws when K is empty at a node (psi > 0 on Gamma0, lo > hi).
  void validate(const Mesh& mesh) const;
};

struct VIProblem {
  DoublePhaseOperator op;
  ConstraintSet K;
  IntervalPtr f;        // interior multifunction, null means {0}
  IntervalPtr f_gamma;  // boundary multifunction on Gamma, null means {0}
  std::vector<ReactionPtr> reactions;  // single-valued extra terms

  const Mesh& mesh() const { return op.mesh(); }
  const MeshPtr& mesh_ptr() const { return op.mesh_ptr(); }
  void validate() const;
};

struct SolveOptions {
  double tol = 1e-9;
  int max_iter = 200;  // Newton steps over all outer iterations
  SelectionRule selection = SelectionRule::lower;
  std::uint64_t seed = 0;
  int max_outer = 50;
  std::optional<FeFunction> initial;
};

struct SolveReport {
  bool converged = false;
  int iterations = 0;        // Newton steps
  int outer_iterations = 0;  // selection updates
  double residual = 0.0;     // final vi_residual
  std::vector<std::size_t> active_set_sizes;  // per Newton step
  std::vector<double> residual_history;       // per outer iteration
  std::vector<double> update_history;         // max nodal change per outer
  SelectionRule selection = SelectionRule::lower;
  std::string enclosure = "n/a";
  std::string message;
  double wall_seconds = 0.0;
};

struct SolveResult {
  FeFunction u;
  QuadratureField eta;   // interior selection in f(x, u(x))
  QuadratureField zeta;  // boundary selection in f_Gamma(x, u(x))
  SolveReport report;
};

/// Frozen-selection outer loop around a semismooth active-set Newton
/// method. Never throws on non-convergence: the best iterate is returned
/// with report.converged = false.
SolveResult solve_vi(const VIProblem& prob, const SolveOptions& opts = {});

/// Selections of the problem's multifunctions at u (zero fields when absent).
QuadratureField select_interior(const VIProblem& prob, const FeFunction& u,
                                SelectionRule rule);
QuadratureField select_boundary(const VIProblem& prob, const FeFunction& u,
                                SelectionRule rule);

/// apply(u) + int eta phi + int_Gamma zeta phi + reaction terms at u.
DualVector residual_vector(const VIProblem& prob, const FeFunction& u,
                           const QuadratureField& eta,
                           const QuadratureField& zeta);

/// Nodal complementarity residual over free nodes; max |r_i| for the whole
/// space. Throws std::invalid_argument when u is not in K.
double vi_residual(const VIProblem& prob, const FeFunction& u,
                   const QuadratureField& eta, const QuadratureField& zeta);

struct CoercivityRow {
  double radius = 0.0;
  double min_value = 0.0;
  int samples = 0;
  bool positive = false;
};

struct CoercivityReport {
  std::vector<CoercivityRow> rows;
  /// "no violation found" or "violation found"; sampling never proves it.
  std::string verdict;
};

/// For every radius R, draws Gaussian nodal directions, projects them to K
/// and rescales to sobolev-Luxemburg norm R (within 1e-6 relative), then
/// evaluates min over endpoint selections of <Au + eta + zeta, u - u0>.
CoercivityReport check_coercivity(const VIProblem& prob, const FeFunction& u0,
                                  const std::vector<double>& radii,
                                  int samples_per_radius, std::uint64_t seed);

/// Auxiliary problem: f and f_Gamma truncated at the pair, plus the penalty
/// b and the compensators (-T_i, +T^j, -U_i, +U^j) as reaction terms.
VIProblem build_auxiliary(const VIProblem& prob, const TruncationData& td);

/// Assembled (unsigned) source of reaction terms at u.
DualVector assemble_reactions(const VIProblem& prob, const FeFunction& u);

}  // namespace dpvi
