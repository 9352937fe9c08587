#include "dpvi/multifun.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "dpvi/kernels.hpp"

namespace dpvi {

const char* to_string(SelectionRule rule) {
  switch (rule) {
    case SelectionRule::lower: return "lower";
    case SelectionRule::upper: return "upper";
    case SelectionRule::midpoint: return "midpoint";
  }
  return "lower";
}

SelectionRule parse_selection_rule(const std::string& text) {
  if (text == "lower") return SelectionRule::lower;
  if (text == "upper") return SelectionRule::upper;
  if (text == "midpoint") return SelectionRule::midpoint;
  throw std::invalid_argument("unknown selection rule '" + text +
                              "' (expected lower, upper or midpoint)");
}

namespace {

std::string order_message(Point w, double s, double lo, double hi) {
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "endpoint order violated at (x=%.17g, y=%.17g), s=%.17g: "
                "lower %.17g > upper %.17g",
                w.x, w.y, s, lo, hi);
  return buf;
}

}  // namespace

EndpointOrderError::EndpointOrderError(Point w, double s_, double lo_,
                                       double hi_)
    : std::runtime_error(order_message(w, s_, lo_, hi_)),
      where(w), s(s_), lo(lo_), hi(hi_) {}

IntervalMultifunction IntervalMultifunction::parse(const std::string& f1,
                                                   const std::string& f2,
                                                   FieldLocation domain) {
  const std::set<std::string> vars{"x", "y", "s"};
  return {parse_expression(f1, vars), parse_expression(f2, vars), domain};
}

Interval IntervalMultifunction::eval(Point x, double s) const {
  const Bindings b{x.x, x.y, s};
  const Interval iv{f1.eval(b), f2.eval(b)};
  if (iv.lo > iv.hi) throw EndpointOrderError(x, s, iv.lo, iv.hi);
  return iv;
}

Interval eval_interval(const IntervalMultifunction& mf, Point x, double s) {
  return mf.eval(x, s);
}

namespace {

class ExprInterval final : public PointwiseInterval {
 public:
  explicit ExprInterval(IntervalMultifunction mf) : mf_(std::move(mf)) {}
  FieldLocation location() const override { return mf_.domain; }
  Interval eval(std::size_t, Point x, double s) const override {
    return mf_.eval(x, s);
  }

 private:
  IntervalMultifunction mf_;
};

class ConstantSource final : public PointwiseInterval {
 public:
  explicit ConstantSource(Expr c) : c_(std::move(c)) {}
  FieldLocation location() const override { return FieldLocation::interior; }
  Interval eval(std::size_t, Point x, double) const override {
    const double v = c_(x.x, x.y);
    return {v, v};
  }

 private:
  Expr c_;
};

}  // namespace

IntervalPtr as_pointwise(const IntervalMultifunction& mf) {
  return std::make_shared<ExprInterval>(mf);
}

IntervalPtr constant_source(const Expr& c) {
  return std::make_shared<ConstantSource>(c);
}

std::size_t field_size(const Mesh& mesh, FieldLocation loc) {
  if (loc == FieldLocation::interior) return mesh.num_quad_points();
  return mesh.facets_with(BoundaryTag::gamma).size() *
         static_cast<std::size_t>(mesh.facet_quad_points());
}

Point field_point(const Mesh& mesh, FieldLocation loc, std::size_t qp) {
  if (loc == FieldLocation::interior) {
    const auto nq = static_cast<std::size_t>(mesh.quad_points_per_element());
    return mesh.quad_point(qp / nq, static_cast<int>(qp % nq));
  }
  const auto nq = static_cast<std::size_t>(mesh.facet_quad_points());
  const std::size_t f = mesh.facets_with(BoundaryTag::gamma)[qp / nq];
  return mesh.facet_quad_point(f, static_cast<int>(qp % nq));
}

double field_value(const FeFunction& u, FieldLocation loc, std::size_t qp) {
  const Mesh& mesh = u.mesh();
  if (loc == FieldLocation::interior) {
    const auto nq = static_cast<std::size_t>(mesh.quad_points_per_element());
    return u.at_quad(qp / nq, static_cast<int>(qp % nq));
  }
  const auto nq = static_cast<std::size_t>(mesh.facet_quad_points());
  const std::size_t f = mesh.facets_with(BoundaryTag::gamma)[qp / nq];
  return u.at_facet_quad(f, static_cast<int>(qp % nq));
}

QuadratureField sample_function(const FeFunction& u, FieldLocation loc) {
  const Mesh& mesh = u.mesh();
  QuadratureField out = loc == FieldLocation::interior
                            ? QuadratureField::interior(mesh)
                            : QuadratureField::boundary(mesh, BoundaryTag::gamma);
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] = field_value(u, loc, i);
  return out;
}

QuadratureField select(const PointwiseInterval& mf, const FeFunction& u,
                       SelectionRule rule) {
  const Mesh& mesh = u.mesh();
  const FieldLocation loc = mf.location();
  QuadratureField out = sample_function(u, loc);
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] = pick(mf.eval(i, field_point(mesh, loc, i), out.values[i]),
                         rule);
  return out;
}

QuadratureField select(const IntervalMultifunction& mf, const FeFunction& u,
                       SelectionRule rule) {
  return select(ExprInterval(mf), u, rule);
}

double sigma_hat(double s) {
  if (s <= 0.0) return 1.0;
  if (s >= 1.0) return 0.0;
  return 1.0 - s;
}

double penalty_value(double s, double lo, double hi, double q) {
  if (s > hi) return std::pow(s - hi, q - 1.0);
  if (s < lo) return -std::pow(lo - s, q - 1.0);
  return 0.0;
}

double penalty_derivative(double s, double lo, double hi, double q) {
  if (s > hi) return (q - 1.0) * std::pow(s - hi, q - 2.0);
  if (s < lo) return (q - 1.0) * std::pow(lo - s, q - 2.0);
  return 0.0;
}

namespace {

QuadratureField select_or_zero(const IntervalPtr& f, const FeFunction& u,
                               SelectionRule rule, FieldLocation loc) {
  if (f) {
    if (f->location() != loc)
      throw std::invalid_argument("multifunction attached to the wrong domain");
    return select(*f, u, rule);
  }
  QuadratureField z = sample_function(u, loc);
  std::fill(z.values.begin(), z.values.end(), 0.0);
  return z;
}

void check_order(const FeFunction& lower, const FeFunction& upper) {
  require_same_mesh(lower, upper);
  for (std::size_t i = 0; i < lower.size(); ++i)
    if (lower[i] > upper[i]) {
      std::ostringstream os;
      os << "truncation bounds not ordered at node " << i << ": lower "
         << lower[i] << " > upper " << upper[i];
      throw std::invalid_argument(os.str());
    }
}

CompensatorData compensator_data(const FeFunction& w, const IntervalPtr& f,
                                 const IntervalPtr& fg, SelectionRule rule) {
  CompensatorData d;
  d.bound = sample_function(w, FieldLocation::interior);
  d.bound_gamma = sample_function(w, FieldLocation::boundary);
  d.eta = select_or_zero(f, w, rule, FieldLocation::interior);
  d.zeta = select_or_zero(fg, w, rule, FieldLocation::boundary);
  return d;
}

}  // namespace

TruncationData TruncationData::make(const FeFunction& lower,
                                    const FeFunction& upper,
                                    const IntervalPtr& f,
                                    const IntervalPtr& f_gamma,
                                    SelectionRule lower_rule,
                                    SelectionRule upper_rule) {
  check_order(lower, upper);
  TruncationData td;
  td.lower = lower;
  td.upper = upper;
  td.lower_at = sample_function(lower, FieldLocation::interior);
  td.upper_at = sample_function(upper, FieldLocation::interior);
  td.lower_at_gamma = sample_function(lower, FieldLocation::boundary);
  td.upper_at_gamma = sample_function(upper, FieldLocation::boundary);
  td.eta_lower = select_or_zero(f, lower, lower_rule, FieldLocation::interior);
  td.eta_upper = select_or_zero(f, upper, upper_rule, FieldLocation::interior);
  td.zeta_lower =
      select_or_zero(f_gamma, lower, lower_rule, FieldLocation::boundary);
  td.zeta_upper =
      select_or_zero(f_gamma, upper, upper_rule, FieldLocation::boundary);
  return td;
}

TruncationData TruncationData::make_multi(const std::vector<FeFunction>& subs,
                                          const std::vector<FeFunction>& supers,
                                          const IntervalPtr& f,
                                          const IntervalPtr& f_gamma) {
  if (subs.empty() || supers.empty())
    throw std::invalid_argument("need at least one sub- and one supersolution");
  FeFunction lo = subs.front(), hi = supers.front();
  for (const auto& w : subs) lo = join(lo, w);
  for (const auto& w : supers) hi = meet(hi, w);
  TruncationData td = make(lo, hi, f, f_gamma);
  for (const auto& w : subs)
    td.extra_lower.push_back(
        compensator_data(w, f, f_gamma, SelectionRule::lower));
  for (const auto& w : supers)
    td.extra_upper.push_back(
        compensator_data(w, f, f_gamma, SelectionRule::upper));
  return td;
}

namespace {

class TruncatedInterval final : public PointwiseInterval {
 public:
  TruncatedInterval(IntervalPtr f, const TruncationData& td)
      : f_(std::move(f)), loc_(f_->location()) {
    const bool in = loc_ == FieldLocation::interior;
    lo_ = in ? td.lower_at.values : td.lower_at_gamma.values;
    hi_ = in ? td.upper_at.values : td.upper_at_gamma.values;
    eta_lo_ = in ? td.eta_lower.values : td.zeta_lower.values;
    eta_hi_ = in ? td.eta_upper.values : td.zeta_upper.values;
  }
  FieldLocation location() const override { return loc_; }
  Interval eval(std::size_t qp, Point x, double s) const override {
    if (s < lo_[qp]) return {eta_lo_[qp], eta_lo_[qp]};
    if (s > hi_[qp]) return {eta_hi_[qp], eta_hi_[qp]};
    return f_->eval(qp, x, s);
  }

 private:
  IntervalPtr f_;
  FieldLocation loc_;
  std::vector<double> lo_, hi_, eta_lo_, eta_hi_;
};

}  // namespace

IntervalPtr truncate_multifunction(const IntervalPtr& f,
                                   const TruncationData& td) {
  if (!f) return nullptr;
  return std::make_shared<TruncatedInterval>(f, td);
}

double penalty_b(const TruncationData& td, const ExponentData& ed,
                 std::size_t qp, double s) {
  return penalty_value(s, td.lower_at.values[qp], td.upper_at.values[qp],
                       ed.q.values[qp]);
}

namespace {

struct CompensatorEval {
  double value;
  double derivative;  // of the unsigned compensator
};

CompensatorEval eval_compensator(CompensatorKind kind, const TruncationData& td,
                                 std::size_t index, std::size_t qp, double s) {
  const bool lower =
      kind == CompensatorKind::T_lower || kind == CompensatorKind::U_lower;
  const bool interior =
      kind == CompensatorKind::T_lower || kind == CompensatorKind::T_upper;
  const CompensatorData& d =
      lower ? td.extra_lower.at(index) : td.extra_upper.at(index);
  const double bound_i = (interior ? d.bound : d.bound_gamma).values[qp];
  const double sel_i = (interior ? d.eta : d.zeta).values[qp];
  double bound, sel;
  if (lower) {
    bound = (interior ? td.lower_at : td.lower_at_gamma).values[qp];
    sel = (interior ? td.eta_lower : td.zeta_lower).values[qp];
  } else {
    bound = (interior ? td.upper_at : td.upper_at_gamma).values[qp];
    sel = (interior ? td.eta_upper : td.zeta_upper).values[qp];
  }
  // Coinciding bounds: the selection there is re-taken from datum i, so the
  // amplitude is zero.
  if (bound == bound_i) return {0.0, 0.0};
  const double amp = std::abs(sel_i - sel);
  if (lower) {
    const double w = bound - bound_i;  // > 0
    const double t = (s - bound_i) / w;
    const double ramp = (t > 0.0 && t < 1.0) ? -1.0 / w : 0.0;
    return {amp * sigma_hat(t), amp * ramp};
  }
  const double w = bound_i - bound;  // > 0
  const double t = (s - bound) / w;
  const double ramp = (t > 0.0 && t < 1.0) ? 1.0 / w : 0.0;
  return {amp * (1.0 - sigma_hat(t)), amp * ramp};
}

}  // namespace

double compensator(CompensatorKind kind, const TruncationData& td,
                   std::size_t index, std::size_t qp, double s) {
  return eval_compensator(kind, td, index, qp, s).value;
}

namespace {

class PenaltyTerm final : public ReactionTerm {
 public:
  PenaltyTerm(std::shared_ptr<const TruncationData> td, const ExponentData& ed)
      : td_(std::move(td)), q_(ed.q.values) {}
  FieldLocation location() const override { return FieldLocation::interior; }
  double value(std::size_t qp, double s) const override {
    return penalty_value(s, td_->lower_at.values[qp], td_->upper_at.values[qp],
                         q_[qp]);
  }
  double derivative(std::size_t qp, double s) const override {
    return penalty_derivative(s, td_->lower_at.values[qp],
                              td_->upper_at.values[qp], q_[qp]);
  }

 private:
  std::shared_ptr<const TruncationData> td_;
  std::vector<double> q_;
};

class CompensatorTerm final : public ReactionTerm {
 public:
  CompensatorTerm(std::shared_ptr<const TruncationData> td,
                  CompensatorKind kind, std::size_t index)
      : td_(std::move(td)), kind_(kind), index_(index) {
    const bool lower =
        kind == CompensatorKind::T_lower || kind == CompensatorKind::U_lower;
    sign_ = lower ? -1.0 : 1.0;
  }
  FieldLocation location() const override {
    return kind_ == CompensatorKind::T_lower || kind_ == CompensatorKind::T_upper
               ? FieldLocation::interior
               : FieldLocation::boundary;
  }
  double value(std::size_t qp, double s) const override {
    return sign_ * eval_compensator(kind_, *td_, index_, qp, s).value;
  }
  double derivative(std::size_t qp, double s) const override {
    return sign_ * eval_compensator(kind_, *td_, index_, qp, s).derivative;
  }

 private:
  std::shared_ptr<const TruncationData> td_;
  CompensatorKind kind_;
  std::size_t index_;
  double sign_;
};

}  // namespace

ReactionPtr penalty_term(std::shared_ptr<const TruncationData> td,
                         const ExponentData& ed) {
  return std::make_shared<PenaltyTerm>(std::move(td), ed);
}

ReactionPtr compensator_term(std::shared_ptr<const TruncationData> td,
                             CompensatorKind kind, std::size_t index) {
  return std::make_shared<CompensatorTerm>(std::move(td), kind, index);
}

DualVector assemble_source(const QuadratureField& field, const Mesh& mesh) {
  if (!field.matches(mesh))
    throw std::invalid_argument("quadrature field layout does not match mesh");
  DualVector out = DualVector::Zero(static_cast<Eigen::Index>(mesh.num_nodes()));
  if (field.location == FieldLocation::interior) {
    std::vector<double> local(mesh.num_elements() * kernels::kVec);
    kernels::element_load(mesh, field.values, local, kernels::Exec::serial);
    kernels::scatter_elements(mesh, local, out);
  } else if (!field.facets.empty()) {
    std::vector<double> local(field.facets.size() * 2);
    kernels::facet_load(mesh, field.facets, field.values, local);
    kernels::scatter_facets(mesh, field.facets, local, out);
  }
  return out;
}

TwoArgIntervalMultifunction TwoArgIntervalMultifunction::parse(
    const std::string& j1, const std::string& j2, FieldLocation domain) {
  const std::set<std::string> vars{"x", "y", "r", "s"};
  return {parse_expression(j1, vars), parse_expression(j2, vars), domain};
}

Interval TwoArgIntervalMultifunction::eval(Point x, double r, double s) const {
  const Bindings b{x.x, x.y, s, r};
  const Interval iv{j1.eval(b), j2.eval(b)};
  if (iv.lo > iv.hi) throw EndpointOrderError(x, s, iv.lo, iv.hi);
  return iv;
}

MonotonicityReport check_r_monotonicity(const TwoArgIntervalMultifunction& j,
                                        const Mesh& mesh, double r_min,
                                        double r_max, double s_min,
                                        double s_max, int samples) {
  MonotonicityReport rep;
  if (samples < 2) samples = 2;
  const std::size_t n = field_size(mesh, j.domain);
  auto grid = [samples](double a, double b, int k) {
    return a + (b - a) * k / (samples - 1);
  };
  auto note = [&rep](const char* what, Point x, double r, double s) {
    if (!rep.first_violation.empty()) return;
    std::ostringstream os;
    os << what << " at x=(" << x.x << ", " << x.y << "), r=" << r << ", s=" << s;
    rep.first_violation = os.str();
  };
  constexpr double slack = 1e-12;
  for (std::size_t i = 0; i < n; ++i) {
    const Point x = field_point(mesh, j.domain, i);
    for (int a = 0; a < samples; ++a) {
      const double s = grid(s_min, s_max, a);
      double prev_lo = 0.0, prev_hi = 0.0;
      for (int b = 0; b < samples; ++b) {
        const double r = grid(r_min, r_max, b);
        const Bindings bind{x.x, x.y, s, r};
        const double lo = j.j1.eval(bind), hi = j.j2.eval(bind);
        if (lo > hi) {
          rep.ordered = false;
          note("j1 > j2", x, r, s);
        }
        if (b > 0) {
          if (lo > prev_lo + slack) {
            rep.lower_nonincreasing = false;
            note("j1 increases in r", x, r, s);
          }
          if (hi > prev_hi + slack) {
            rep.upper_nonincreasing = false;
            note("j2 increases in r", x, r, s);
          }
        }
        prev_lo = lo;
        prev_hi = hi;
      }
    }
  }
  return rep;
}

namespace {

class FrozenR final : public PointwiseInterval {
 public:
  FrozenR(TwoArgIntervalMultifunction j, const FeFunction& r)
      : j_(std::move(j)), r_(sample_function(r, j_.domain).values) {}
  FieldLocation location() const override { return j_.domain; }
  Interval eval(std::size_t qp, Point x, double s) const override {
    return j_.eval(x, r_[qp], s);
  }

 private:
  TwoArgIntervalMultifunction j_;
  std::vector<double> r_;
};

}  // namespace

IntervalPtr freeze_r(const TwoArgIntervalMultifunction& j,
                     const FeFunction& r) {
  return std::make_shared<FrozenR>(j, r);
}

}  // namespace dpvi
