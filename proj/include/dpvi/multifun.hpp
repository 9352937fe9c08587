#pragma once

// Interval-valued lower-order terms f(x,s) = [f1(x,s), f2(x,s)], their
// selections, and the truncation / penalty / compensator construction that
// turns a problem with an ordered sub/supersolution pair into an auxiliary
// problem whose solutions are enclosed by the pair.

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpvi/expr.hpp"
#include "dpvi/mesh.hpp"
#include "dpvi/operator.hpp"
#include "dpvi/spaces.hpp"

namespace dpvi {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v, double tol = 0.0) const {
    return v >= lo - tol && v <= hi + tol;
  }
};

enum class SelectionRule { lower, upper, midpoint };

const char* to_string(SelectionRule rule);
SelectionRule parse_selection_rule(const std::string& text);

inline double pick(const Interval& iv, SelectionRule rule) {
  switch (rule) {
    case SelectionRule::lower: return iv.lo;
    case SelectionRule::upper: return iv.hi;
    case SelectionRule::midpoint: return 0.5 * (iv.lo + iv.hi);
  }
  return iv.lo;
}

class EndpointOrderError : public std::runtime_error {
 public:
  EndpointOrderError(Point where, double s, double lo, double hi);
  Point where;
  double s, lo, hi;
};

/// Multifunction given by endpoint expressions in (x, y, s).
struct IntervalMultifunction {
  Expr f1, f2;
  FieldLocation domain = FieldLocation::interior;

  static IntervalMultifunction parse(const std::string& f1,
                                     const std::string& f2,
                                     FieldLocation domain =
                                         FieldLocation::interior);
  static IntervalMultifunction single(const std::string& f,
                                      FieldLocation domain =
                                          FieldLocation::interior) {
    return parse(f, f, domain);
  }

  Interval eval(Point x, double s) const;
};

Interval eval_interval(const IntervalMultifunction& mf, Point x, double s);

/// Pointwise interval evaluator addressed by quadrature point. The index is
/// e * nq + k for interior fields and i * nqf + k over the Gamma facet list
/// for boundary fields.
class PointwiseInterval {
 public:
  virtual ~PointwiseInterval() = default;
  virtual FieldLocation location() const = 0;
  virtual Interval eval(std::size_t qp, Point x, double s) const = 0;
};

using IntervalPtr = std::shared_ptr<const PointwiseInterval>;

IntervalPtr as_pointwise(const IntervalMultifunction& mf);

/// Constant single-valued source c(x) (no s dependence).
IntervalPtr constant_source(const Expr& c);

/// Quadrature points covered by a field at `loc` on `mesh`
/// (interior, or the Gamma facets for boundary fields).
std::size_t field_size(const Mesh& mesh, FieldLocation loc);
Point field_point(const Mesh& mesh, FieldLocation loc, std::size_t qp);
double field_value(const FeFunction& u, FieldLocation loc, std::size_t qp);
/// u sampled at every point of the field layout.
QuadratureField sample_function(const FeFunction& u, FieldLocation loc);

/// Pointwise selection eta(x) in f(x, u(x)).
QuadratureField select(const PointwiseInterval& mf, const FeFunction& u,
                       SelectionRule rule);
QuadratureField select(const IntervalMultifunction& mf, const FeFunction& u,
                       SelectionRule rule);

/// 1 for s <= 0, 1 - s on [0, 1], 0 for s >= 1.
double sigma_hat(double s);

/// [s - hi]^{q-1} above, 0 inside [lo, hi], -[lo - s]^{q-1} below.
double penalty_value(double s, double lo, double hi, double q);
double penalty_derivative(double s, double lo, double hi, double q);

/// Data of one additional subsolution (or supersolution) entering the
/// compensator terms.
struct CompensatorData {
  QuadratureField bound;        // u_i (or u^j) at interior points
  QuadratureField bound_gamma;  // ... at Gamma points
  QuadratureField eta;          // its selection
  QuadratureField zeta;         // its boundary selection
};

/// Ordered pair (lower <= upper) with frozen selections at the bounds.
struct TruncationData {
  FeFunction lower, upper;
  QuadratureField lower_at, upper_at;              // interior samples
  QuadratureField lower_at_gamma, upper_at_gamma;  // Gamma samples
  QuadratureField eta_lower, eta_upper;
  QuadratureField zeta_lower, zeta_upper;
  std::vector<CompensatorData> extra_lower;  // subsolutions u_i, i = 1..k
  std::vector<CompensatorData> extra_upper;  // supersolutions u^j, j = 1..m

  /// Single pair. Selections default to the lower endpoint at `lower` and
  /// the upper endpoint at `upper`. Null multifunctions select 0.
  static TruncationData make(const FeFunction& lower, const FeFunction& upper,
                             const IntervalPtr& f, const IntervalPtr& f_gamma,
                             SelectionRule lower_rule = SelectionRule::lower,
                             SelectionRule upper_rule = SelectionRule::upper);

  /// Several sub- and supersolutions: lower = nodal max of `subs`, upper =
  /// nodal min of `supers`; each one also feeds a compensator.
  static TruncationData make_multi(const std::vector<FeFunction>& subs,
                                   const std::vector<FeFunction>& supers,
                                   const IntervalPtr& f,
                                   const IntervalPtr& f_gamma);

  const Mesh& mesh() const { return lower.mesh(); }
};

/// f0: {eta_lower} below the pair, f inside, {eta_upper} above. Boundary
/// multifunctions use the zeta selections.
IntervalPtr truncate_multifunction(const IntervalPtr& f,
                                   const TruncationData& td);

/// b(x, s) at interior point qp.
double penalty_b(const TruncationData& td, const ExponentData& ed,
                 std::size_t qp, double s);

enum class CompensatorKind { T_lower, T_upper, U_lower, U_upper };

/// T_i, T^j (interior) or U_i, U^j (boundary) for extra datum `index`.
/// Zero where the two bounds coincide.
double compensator(CompensatorKind kind, const TruncationData& td,
                   std::size_t index, std::size_t qp, double s);

/// Single-valued lower-order term with its s-derivative, evaluated at
/// quadrature points. Adds int value(x, u) v to the residual.
class ReactionTerm {
 public:
  virtual ~ReactionTerm() = default;
  virtual FieldLocation location() const = 0;
  virtual double value(std::size_t qp, double s) const = 0;
  virtual double derivative(std::size_t qp, double s) const = 0;
};

using ReactionPtr = std::shared_ptr<const ReactionTerm>;

ReactionPtr penalty_term(std::shared_ptr<const TruncationData> td,
                         const ExponentData& ed);
/// Signed compensator: -T_i, +T^j, -U_i, +U^j.
ReactionPtr compensator_term(std::shared_ptr<const TruncationData> td,
                             CompensatorKind kind, std::size_t index);

/// int field * phi_i over the interior or over the field's facets.
DualVector assemble_source(const QuadratureField& field, const Mesh& mesh);

/// Endpoint functions j1(x, r, s) <= j2(x, r, s) of a two-argument
/// multifunction; freezing r = v(x) yields an ordinary interval.
struct TwoArgIntervalMultifunction {
  Expr j1, j2;
  FieldLocation domain = FieldLocation::interior;

  static TwoArgIntervalMultifunction parse(const std::string& j1,
                                           const std::string& j2,
                                           FieldLocation domain =
                                               FieldLocation::interior);
  Interval eval(Point x, double r, double s) const;
};

struct MonotonicityReport {
  bool lower_nonincreasing = true;
  bool upper_nonincreasing = true;
  bool ordered = true;
  std::string first_violation;
  bool ok() const { return lower_nonincreasing && upper_nonincreasing && ordered; }
};

/// Samples r -> j1, r -> j2 on a grid at every quadrature point of `mesh`
/// and checks both are nonincreasing, which makes the frozen-argument
/// fixed-point operators increasing.
MonotonicityReport check_r_monotonicity(const TwoArgIntervalMultifunction& j,
                                        const Mesh& mesh, double r_min,
                                        double r_max, double s_min,
                                        double s_max, int samples = 21);

IntervalPtr freeze_r(const TwoArgIntervalMultifunction& j,
                     const FeFunction& r);

}  // namespace dpvi
