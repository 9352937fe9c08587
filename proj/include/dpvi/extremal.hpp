#pragma once

// Sub-/supersolution certificates, the obstacle-problem construction of an
// ordered pair, enclosure solves through the auxiliary problem, monotone
// iterations toward the smallest and greatest solutions, and the
// frozen-argument fixed-point scheme for two-argument multifunctions.

#include <optional>
#include <string>
#include <vector>

#include "dpvi/multifun.hpp"
#include "dpvi/visolve.hpp"

namespace dpvi {

struct Certificate {
  std::string kind;  // "subsolution" or "supersolution"
  bool lattice_ok = true;
  std::string lattice_message;
  /// Worst signed margin over the checked nodal directions:
  /// -r_i for subsolutions, r_i for supersolutions. Passes when >= -tol.
  double margin = 0.0;
  std::size_t worst_node = 0;
  std::size_t checked_nodes = 0;
  double tol = 0.0;
  SelectionRule rule = SelectionRule::lower;
  bool ok() const { return lattice_ok && margin >= -tol; }
};

/// Directions v = u ^ phi reduce to nodal hats at free nodes where u lies
/// strictly above the lower bound of K; there r_i <= tol is required for
/// r = Au + int eta phi + int_Gamma zeta phi. With rule = lower the check is
/// exact: the lower endpoint minimizes every r_i at once.
Certificate verify_subsolution(const FeFunction& u, const VIProblem& prob,
                               SelectionRule rule = SelectionRule::lower,
                               double tol = 1e-9);
/// Symmetric: r_i >= -tol at free nodes below the upper bound of K.
Certificate verify_supersolution(const FeFunction& u, const VIProblem& prob,
                                 SelectionRule rule = SelectionRule::upper,
                                 double tol = 1e-9);

struct OrderedInterval {
  FeFunction lower, upper;
  Certificate sub, super;
  // Filled by construct_obstacle_bounds only.
  bool constructed = false;
  double M = 0.0;
  double c_psi = 0.0;
  Expr k1, k2;
  FeFunction u1, u2;

  bool certified() const { return sub.ok() && super.ok(); }
};

/// Orders check plus both certificates.
OrderedInterval make_interval(const FeFunction& lower, const FeFunction& upper,
                              const VIProblem& prob, double tol = 1e-9);

struct HfViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ObstacleBoundsOptions {
  double margin = 1e-3;
  double s_min = -10.0, s_max = 10.0;
  int s_samples = 201;
  double dirichlet_tol = 1e-12;
  double certificate_tol = 1e-9;
};

/// Samples f1 <= k1 and f2 >= k2, solves Au_i = -k_i with zero Dirichlet
/// data on the whole boundary, sets M = max(0, c_psi - min u2,
/// max(u1 - u2)) + margin and returns [u1, u2 + M] with certificates.
OrderedInterval construct_obstacle_bounds(const VIProblem& prob,
                                          const Expr& k1, const Expr& k2,
                                          double c_psi,
                                          const ObstacleBoundsOptions& o = {});

struct EnclosedResult {
  SolveResult solution;  // u with selections for the original problem
  bool enclosed = false;
  double enclosure_violation = 0.0;
  std::size_t worst_node = 0;
  double reaction_max = 0.0;  // max |b| and compensators at u
  double original_residual = 0.0;
  bool ok = false;
  std::string message;
};

/// Solves the auxiliary problem for the pair, checks enclosure and that the
/// penalty and compensators vanish, and re-evaluates the original residual.
EnclosedResult solve_enclosed(const VIProblem& prob, const OrderedInterval& oi,
                              const SolveOptions& opts = {});

struct IterationRecord {
  int iter = 0;
  double max_update = 0.0;
  double residual = 0.0;
};

struct SolutionSet {
  std::vector<FeFunction> members;
  std::size_t smallest = 0;  // index of u_* in members
  std::size_t greatest = 0;  // index of u^*
};

struct ExtremalResult {
  FeFunction smallest, greatest;  // u_*, u^*
  SolutionSet set;
  std::vector<IterationRecord> greatest_history, smallest_history;
  std::vector<FeFunction> greatest_iterates, smallest_iterates;
  bool greatest_monotone = true;  // nonincreasing within 1e-10
  bool smallest_monotone = true;  // nondecreasing within 1e-10
  bool ordered = true;            // u_* <= member <= u^* within 1e-8
  bool converged = false;
  std::string message;
};

struct ExtremalOptions {
  SolveOptions solve;
  int max_iter = 50;
  double stop_tol = 1e-10;
  double monotone_tol = 1e-10;
  double order_tol = 1e-8;
};

/// Monotone iteration from the upper bound (selection f1) toward the greatest
/// solution and from the lower bound (selection f2) toward the smallest.
ExtremalResult extremal_pair(const VIProblem& prob, const OrderedInterval& oi,
                             const ExtremalOptions& opts = {});

struct DiscontinuousOptions {
  ExtremalOptions extremal;
  int max_outer = 50;
  double stop_tol = 1e-10;
  double monotone_tol = 1e-10;
  // Sampling box for the r-monotonicity check.
  double r_min = -2.0, r_max = 2.0, s_min = -2.0, s_max = 2.0;
  int samples = 21;
};

struct DiscontinuousResult {
  FeFunction smallest, greatest;
  std::vector<FeFunction> g_iterates, t_iterates;  // include the start
  std::vector<IterationRecord> g_history, t_history;
  int g_outer = 0, t_outer = 0;
  bool g_monotone = true;  // nonincreasing
  bool t_monotone = true;  // nondecreasing
  bool converged = false;
  bool iterates_verified = true;  // G iterates as super-, T as subsolutions
  MonotonicityReport monotonicity;
  std::string message;
};

/// s -> j(x, s, s): the one-argument multifunction whose solutions the
/// fixed-point scheme computes. Certify intervals against it.
IntervalPtr diagonal_multifunction(const TwoArgIntervalMultifunction& j);

/// Two-argument multifunction j(x, r, s) on its domain (interior or Gamma);
/// the matching member of prob is replaced by j with r frozen at the
/// current iterate.
DiscontinuousResult discontinuous_fixed_point(
    const VIProblem& prob, const TwoArgIntervalMultifunction& j,
    const OrderedInterval& oi, const DiscontinuousOptions& opts = {});

}  // namespace dpvi
