#include "dpvi/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace dpvi {

namespace {

Certificate verify(const FeFunction& u, const VIProblem& prob,
                   SelectionRule rule, double tol, bool sub) {
  if (u.mesh_ptr().get() != &prob.mesh())
    throw MeshError("candidate lives on a different mesh");
  const Mesh& m = prob.mesh();
  const ConstraintSet& K = prob.K;
  Certificate c;
  c.kind = sub ? "subsolution" : "supersolution";
  c.tol = tol;
  c.rule = rule;

  // Lattice part: u v K in K (sub) or u ^ K in K (super).
  std::ostringstream lat;
  for (std::size_t i = 0; i < m.num_nodes() && c.lattice_ok; ++i) {
    if (m.is_dirichlet(i) && (sub ? u[i] > 0.0 : u[i] < 0.0)) {
      c.lattice_ok = false;
      lat << "value " << u[i] << " at Dirichlet node " << i
          << (sub ? " is positive" : " is negative");
    } else if (sub && K.has_upper() && u[i] > K.upper(i)) {
      c.lattice_ok = false;
      lat << "value " << u[i] << " exceeds the upper bound " << K.upper(i)
          << " at node " << i;
    } else if (!sub && K.has_lower() && u[i] < K.lower(i)) {
      c.lattice_ok = false;
      lat << "value " << u[i] << " is below the lower bound " << K.lower(i)
          << " at node " << i;
    }
  }
  c.lattice_message = lat.str();

  const DualVector r = residual_vector(prob, u, select_interior(prob, u, rule),
                                       select_boundary(prob, u, rule));
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m.num_nodes(); ++i) {
    if (m.is_dirichlet(i)) continue;
    if (sub ? !(u[i] > K.lower(i)) : !(u[i] < K.upper(i))) continue;
    const double ri = r[static_cast<Eigen::Index>(i)];
    const double mi = sub ? -ri : ri;
    ++c.checked_nodes;
    if (mi < worst) {
      worst = mi;
      c.worst_node = i;
    }
  }
  c.margin = c.checked_nodes ? worst : 0.0;
  return c;
}

double max_abs_diff(const FeFunction& a, const FeFunction& b) {
  return (a.coeffs() - b.coeffs()).cwiseAbs().maxCoeff();
}

// Pulls nodes that sit within rounding of the interval back inside it, so
// the next bound pair is ordered exactly.
FeFunction snap(FeFunction w, const FeFunction& lo, const FeFunction& hi) {
  for (std::size_t i = 0; i < w.size(); ++i)
    w[i] = std::clamp(w[i], lo[i], hi[i]);
  return w;
}

// Largest amount by which a exceeds b at any node.
double excess(const FeFunction& a, const FeFunction& b) {
  return (a.coeffs() - b.coeffs()).maxCoeff();
}

}  // namespace

Certificate verify_subsolution(const FeFunction& u, const VIProblem& prob,
                               SelectionRule rule, double tol) {
  return verify(u, prob, rule, tol, true);
}

Certificate verify_supersolution(const FeFunction& u, const VIProblem& prob,
                                 SelectionRule rule, double tol) {
  return verify(u, prob, rule, tol, false);
}

OrderedInterval make_interval(const FeFunction& lower, const FeFunction& upper,
                              const VIProblem& prob, double tol) {
  require_same_mesh(lower, upper);
  for (std::size_t i = 0; i < lower.size(); ++i)
    if (lower[i] > upper[i]) {
      std::ostringstream os;
      os << "interval not ordered at node " << i << ": " << lower[i] << " > "
         << upper[i];
      throw std::invalid_argument(os.str());
    }
  OrderedInterval oi;
  oi.lower = lower;
  oi.upper = upper;
  oi.sub = verify_subsolution(lower, prob, SelectionRule::lower, tol);
  oi.super = verify_supersolution(upper, prob, SelectionRule::upper, tol);
  return oi;
}

OrderedInterval construct_obstacle_bounds(const VIProblem& prob,
                                          const Expr& k1, const Expr& k2,
                                          double c_psi,
                                          const ObstacleBoundsOptions& o) {
  prob.validate();
  const Mesh& m = prob.mesh();
  const MeshPtr& mp = prob.mesh_ptr();
  if (!m.facets_with(BoundaryTag::gamma).empty())
    throw std::invalid_argument(
        "obstacle bounds need homogeneous Dirichlet data on the whole boundary");
  if (prob.K.kind == ConstraintKind::box)
    throw std::invalid_argument("obstacle bounds need an obstacle or whole-space K");
  const bool obstacle = prob.K.kind == ConstraintKind::obstacle;
  if (obstacle && !(c_psi > 0.0))
    throw std::invalid_argument("c_psi must be positive");
  if (obstacle)
    for (std::size_t i = 0; i < m.num_nodes(); ++i)
      if (prob.K.lo[i] > c_psi) {
        std::ostringstream os;
        os << "obstacle value " << prob.K.lo[i] << " exceeds c_psi = " << c_psi
           << " at node " << i;
        throw std::invalid_argument(os.str());
      }

  // One-sided bounds on f, sampled at every interior quadrature point.
  const std::size_t nq = field_size(m, FieldLocation::interior);
  const int ns = std::max(2, o.s_samples);
  for (std::size_t i = 0; i < nq; ++i) {
    const Point x = field_point(m, FieldLocation::interior, i);
    const double b1 = k1(x.x, x.y), b2 = k2(x.x, x.y);
    for (int a = 0; a < ns; ++a) {
      const double s = o.s_min + (o.s_max - o.s_min) * a / (ns - 1);
      const Interval iv = prob.f ? prob.f->eval(i, x, s) : Interval{0.0, 0.0};
      const bool bad1 = iv.lo > b1 + 1e-12 * std::max(1.0, std::abs(b1));
      const bool bad2 = iv.hi < b2 - 1e-12 * std::max(1.0, std::abs(b2));
      if (bad1 || bad2) {
        std::ostringstream os;
        os.precision(17);
        os << "one-sided bound violated at x=(" << x.x << ", " << x.y
           << "), s=" << s << ": "
           << (bad1 ? "f1 = " : "f2 = ") << (bad1 ? iv.lo : iv.hi)
           << (bad1 ? " > k1 = " : " < k2 = ") << (bad1 ? b1 : b2);
        throw HfViolation(os.str());
      }
    }
  }

  auto dirichlet = [&](const Expr& k, const char* name) {
    VIProblem dp{prob.op, ConstraintSet::whole_space(), constant_source(k),
                 nullptr, {}};
    SolveOptions so;
    so.tol = o.dirichlet_tol;
    so.max_iter = 500;
    SolveResult sr = solve_vi(dp, so);
    if (!sr.report.converged) {
      std::ostringstream os;
      os << "Dirichlet solve for " << name << " failed: " << sr.report.message
         << " (residual " << sr.report.residual << ")";
      throw std::runtime_error(os.str());
    }
    return sr.u;
  };
  FeFunction u1 = dirichlet(k1, "k1");
  FeFunction u2 = dirichlet(k2, "k2");

  const double min_u2 = u2.coeffs().minCoeff();
  const double gap = excess(u1, u2);
  // c_psi only matters when there is an obstacle to clear.
  const double clear = obstacle ? c_psi - min_u2 : 0.0;
  const double M = std::max({0.0, clear, gap}) + o.margin;
  FeFunction upper(mp, u2.coeffs().array() + M);

  OrderedInterval oi = make_interval(u1, upper, prob, o.certificate_tol);
  oi.constructed = true;
  oi.M = M;
  oi.c_psi = c_psi;
  oi.k1 = k1;
  oi.k2 = k2;
  oi.u1 = std::move(u1);
  oi.u2 = std::move(u2);
  return oi;
}

EnclosedResult solve_enclosed(const VIProblem& prob, const OrderedInterval& oi,
                              const SolveOptions& opts) {
  if (!oi.certified())
    throw std::invalid_argument(
        "interval certificates do not pass; refusing to solve");
  const TruncationData td =
      TruncationData::make(oi.lower, oi.upper, prob.f, prob.f_gamma);
  const VIProblem aux = build_auxiliary(prob, td);

  SolveOptions so = opts;
  if (!so.initial) {
    FeFunction start = fe_constant(prob.mesh_ptr(), 0.0);
    start = meet(join(start, oi.lower), oi.upper);
    so.initial = prob.K.project(start);
  }
  EnclosedResult er;
  er.solution = solve_vi(aux, so);
  const FeFunction& u = er.solution.u;

  er.enclosure_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double v = std::max(oi.lower[i] - u[i], u[i] - oi.upper[i]);
    if (v > er.enclosure_violation) {
      er.enclosure_violation = v;
      er.worst_node = i;
    }
  }
  er.enclosure_violation = std::max(er.enclosure_violation, 0.0);
  er.enclosed = er.enclosure_violation <= opts.tol;

  // Penalty and compensators at u (the terms added by build_auxiliary).
  const auto ui = sample_function(u, FieldLocation::interior).values;
  const auto ub = sample_function(u, FieldLocation::boundary).values;
  for (std::size_t k = prob.reactions.size(); k < aux.reactions.size(); ++k) {
    const auto& r = aux.reactions[k];
    const auto& s = r->location() == FieldLocation::interior ? ui : ub;
    for (std::size_t i = 0; i < s.size(); ++i)
      er.reaction_max = std::max(er.reaction_max, std::abs(r->value(i, s[i])));
  }

  // Selections and residual for the original problem.
  er.solution.eta = select_interior(prob, u, opts.selection);
  er.solution.zeta = select_boundary(prob, u, opts.selection);
  er.original_residual =
      vi_residual(prob, u, er.solution.eta, er.solution.zeta);

  std::ostringstream os;
  if (!er.solution.report.converged) {
    os << "auxiliary solve did not converge: " << er.solution.report.message;
  } else if (!er.enclosed) {
    os << "enclosure violated by " << er.enclosure_violation << " at node "
       << er.worst_node;
  } else if (er.original_residual > opts.tol) {
    os << "original residual " << er.original_residual << " exceeds tol";
  } else {
    os << "enclosed";
    er.ok = true;
  }
  er.message = os.str();
  er.solution.report.enclosure =
      er.enclosed ? "enclosed"
                  : "violated at node " + std::to_string(er.worst_node);
  er.solution.report.residual = er.original_residual;
  return er;
}

ExtremalResult extremal_pair(const VIProblem& prob, const OrderedInterval& oi,
                             const ExtremalOptions& opts) {
  if (!oi.certified())
    throw std::invalid_argument(
        "interval certificates do not pass; refusing to iterate");
  ExtremalResult res;
  const double cert_tol = std::max(1e-9, opts.solve.tol);
  std::ostringstream msg;

  // greatest == true: from the upper bound with the lower endpoint selected.
  auto run = [&](bool greatest, FeFunction& out,
                 std::vector<IterationRecord>& hist,
                 std::vector<FeFunction>& iterates, bool& monotone) {
    FeFunction v = greatest ? oi.upper : oi.lower;
    iterates.push_back(v);
    for (int k = 0; k < opts.max_iter; ++k) {
      OrderedInterval iv = greatest ? make_interval(oi.lower, v, prob, cert_tol)
                                    : make_interval(v, oi.upper, prob, cert_tol);
      if (!iv.certified()) {
        msg << (greatest ? "greatest" : "smallest")
            << " iteration: bound failed certification at step " << k << "; ";
        return false;
      }
      SolveOptions so = opts.solve;
      so.selection = greatest ? SelectionRule::lower : SelectionRule::upper;
      so.initial = prob.K.project(v);
      const EnclosedResult er = solve_enclosed(prob, iv, so);
      if (!er.ok) {
        msg << (greatest ? "greatest" : "smallest") << " iteration step " << k
            << ": " << er.message << "; ";
        return false;
      }
      const FeFunction w = snap(er.solution.u, iv.lower, iv.upper);
      const double step_excess = greatest ? excess(w, v) : excess(v, w);
      if (step_excess > opts.monotone_tol) monotone = false;
      const double upd = max_abs_diff(w, v);
      hist.push_back({k + 1, upd, er.original_residual});
      iterates.push_back(w);
      res.set.members.push_back(w);
      v = w;
      if (upd <= opts.stop_tol) {
        out = v;
        return true;
      }
    }
    msg << (greatest ? "greatest" : "smallest")
        << " iteration limit reached; ";
    out = v;
    return false;
  };

  const bool g_ok = run(true, res.greatest, res.greatest_history,
                        res.greatest_iterates, res.greatest_monotone);
  const std::size_t g_index = res.set.members.size() - (g_ok ? 1 : 0);
  const bool s_ok = run(false, res.smallest, res.smallest_history,
                        res.smallest_iterates, res.smallest_monotone);
  res.converged = g_ok && s_ok;
  if (res.converged) {
    res.set.greatest = g_index;
    res.set.smallest = res.set.members.size() - 1;
    for (const auto& mbr : res.set.members)
      if (excess(res.smallest, mbr) > opts.order_tol ||
          excess(mbr, res.greatest) > opts.order_tol)
        res.ordered = false;
  } else {
    res.ordered = false;
  }
  if (res.converged && !res.greatest_monotone)
    msg << "greatest iterates not nonincreasing; ";
  if (res.converged && !res.smallest_monotone)
    msg << "smallest iterates not nondecreasing; ";
  if (res.converged && !res.ordered) msg << "solution set not ordered; ";
  res.message = msg.str().empty() ? "converged" : msg.str();
  return res;
}

namespace {

class DiagonalJ final : public PointwiseInterval {
 public:
  explicit DiagonalJ(TwoArgIntervalMultifunction j) : j_(std::move(j)) {}
  FieldLocation location() const override { return j_.domain; }
  Interval eval(std::size_t, Point x, double s) const override {
    return j_.eval(x, s, s);
  }

 private:
  TwoArgIntervalMultifunction j_;
};

VIProblem with_multifunction(const VIProblem& prob, FieldLocation where,
                             IntervalPtr f) {
  VIProblem out = prob;
  (where == FieldLocation::interior ? out.f : out.f_gamma) = std::move(f);
  return out;
}

}  // namespace

IntervalPtr diagonal_multifunction(const TwoArgIntervalMultifunction& j) {
  return std::make_shared<DiagonalJ>(j);
}

DiscontinuousResult discontinuous_fixed_point(
    const VIProblem& prob, const TwoArgIntervalMultifunction& j,
    const OrderedInterval& oi, const DiscontinuousOptions& opts) {
  DiscontinuousResult res;
  res.monotonicity = check_r_monotonicity(j, prob.mesh(), opts.r_min,
                                          opts.r_max, opts.s_min, opts.s_max,
                                          opts.samples);
  if (!res.monotonicity.ok())
    throw std::invalid_argument("r-monotonicity check failed: " +
                                res.monotonicity.first_violation);
  if (!oi.certified())
    throw std::invalid_argument(
        "interval certificates do not pass; refusing to iterate");
  const VIProblem diag = with_multifunction(prob, j.domain,
                                            diagonal_multifunction(j));
  const bool r_free = !j.j1.uses(Var::r) && !j.j2.uses(Var::r);
  const double cert_tol = std::max(1e-9, opts.extremal.solve.tol);
  std::ostringstream msg;

  // G: greatest fixed point from above; T: smallest from below.
  auto run = [&](bool g, FeFunction& out, std::vector<FeFunction>& iterates,
                 std::vector<IterationRecord>& hist, int& outer,
                 bool& monotone) {
    FeFunction v = g ? oi.upper : oi.lower;
    iterates.push_back(v);
    const char* name = g ? "G" : "T";
    for (int k = 0; k < opts.max_outer; ++k) {
      const VIProblem frozen =
          with_multifunction(prob, j.domain, freeze_r(j, v));
      const OrderedInterval iv = g ? make_interval(oi.lower, v, frozen, cert_tol)
                                   : make_interval(v, oi.upper, frozen, cert_tol);
      if (!iv.certified()) {
        msg << name << " step " << k << ": frozen interval failed certification; ";
        return false;
      }
      const ExtremalResult er = extremal_pair(frozen, iv, opts.extremal);
      if (!er.converged) {
        msg << name << " step " << k << ": " << er.message;
        return false;
      }
      const FeFunction w = snap(g ? er.greatest : er.smallest, iv.lower, iv.upper);
      const double step_excess = g ? excess(w, v) : excess(v, w);
      if (step_excess > opts.monotone_tol) monotone = false;
      // Re-verify the iterate against the original (diagonal) problem.
      const Certificate c = g ? verify_supersolution(w, diag, SelectionRule::upper,
                                                     cert_tol)
                              : verify_subsolution(w, diag, SelectionRule::lower,
                                                   cert_tol);
      if (!c.ok()) res.iterates_verified = false;
      const double upd = max_abs_diff(w, v);
      const auto& sh = g ? er.greatest_history : er.smallest_history;
      hist.push_back({k + 1, upd, sh.empty() ? 0.0 : sh.back().residual});
      iterates.push_back(w);
      ++outer;
      v = w;
      if (r_free || upd <= opts.stop_tol) {
        out = v;
        return true;
      }
    }
    msg << name << " iteration limit reached; ";
    out = v;
    return false;
  };

  const bool g_ok = run(true, res.greatest, res.g_iterates, res.g_history,
                        res.g_outer, res.g_monotone);
  const bool t_ok = run(false, res.smallest, res.t_iterates, res.t_history,
                        res.t_outer, res.t_monotone);
  res.converged = g_ok && t_ok;
  if (res.converged && excess(res.smallest, res.greatest) > 1e-8)
    msg << "smallest fixed point exceeds the greatest; ";
  if (!res.g_monotone) msg << "G iterates not nonincreasing; ";
  if (!res.t_monotone) msg << "T iterates not nondecreasing; ";
  if (!res.iterates_verified) msg << "an iterate failed re-verification; ";
  res.message = msg.str().empty() ? "converged" : msg.str();
  return res;
}

}  // namespace dpvi
