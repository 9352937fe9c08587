#include "dpvi/visolve.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/SparseCholesky>

#include "dpvi/kernels.hpp"

namespace dpvi {

const char* to_string(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::whole_space: return "whole_space";
    case ConstraintKind::obstacle: return "obstacle";
    case ConstraintKind::box: return "box";
  }
  return "whole_space";
}

ConstraintSet ConstraintSet::obstacle(FeFunction psi) {
  ConstraintSet k;
  k.kind = ConstraintKind::obstacle;
  k.lo = std::move(psi);
  return k;
}

ConstraintSet ConstraintSet::box(FeFunction lo, FeFunction hi) {
  require_same_mesh(lo, hi);
  ConstraintSet k;
  k.kind = ConstraintKind::box;
  k.lo = std::move(lo);
  k.hi = std::move(hi);
  return k;
}

FeFunction ConstraintSet::project(const FeFunction& u) const {
  FeFunction out = u;
  const Mesh& m = u.mesh();
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (m.is_dirichlet(i)) {
      out[i] = 0.0;
      continue;
    }
    out[i] = std::min(std::max(out[i], lower(i)), upper(i));
  }
  return out;
}

double ConstraintSet::infeasibility(const FeFunction& u) const {
  const Mesh& m = u.mesh();
  double worst = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (m.is_dirichlet(i)) worst = std::max(worst, std::abs(u[i]));
    worst = std::max(worst, lower(i) - u[i]);
    worst = std::max(worst, u[i] - upper(i));
  }
  return worst;
}

void ConstraintSet::validate(const Mesh& mesh) const {
  if (kind == ConstraintKind::whole_space) return;
  auto on_mesh = [&mesh](const FeFunction& f) {
    if (!f.mesh_ptr() || f.mesh_ptr().get() != &mesh)
      throw MeshError("constraint bound lives on a different mesh");
  };
  on_mesh(lo);
  if (has_upper()) on_mesh(hi);
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i) {
    std::ostringstream os;
    if (mesh.is_dirichlet(i) && lower(i) > 0.0) {
      os << "empty constraint set: lower bound " << lower(i)
         << " > 0 at Dirichlet node " << i;
      throw std::invalid_argument(os.str());
    }
    if (mesh.is_dirichlet(i) && upper(i) < 0.0) {
      os << "empty constraint set: upper bound " << upper(i)
         << " < 0 at Dirichlet node " << i;
      throw std::invalid_argument(os.str());
    }
    if (lower(i) > upper(i)) {
      os << "empty constraint set: lower " << lower(i) << " > upper "
         << upper(i) << " at node " << i;
      throw std::invalid_argument(os.str());
    }
  }
}

void VIProblem::validate() const {
  K.validate(mesh());
  if (f && f->location() != FieldLocation::interior)
    throw std::invalid_argument("interior multifunction flagged as boundary");
  if (f_gamma && f_gamma->location() != FieldLocation::boundary)
    throw std::invalid_argument("boundary multifunction flagged as interior");
}

namespace {

QuadratureField zero_field(const Mesh& m, FieldLocation loc) {
  return loc == FieldLocation::interior
             ? QuadratureField::interior(m)
             : QuadratureField::boundary(m, BoundaryTag::gamma);
}

// Integration weight of field point qp.
double point_weight(const Mesh& m, FieldLocation loc, std::size_t qp) {
  if (loc == FieldLocation::interior) {
    const auto nq = static_cast<std::size_t>(m.quad_points_per_element());
    return m.quad_weight(static_cast<int>(qp % nq)) * m.measure(qp / nq);
  }
  const auto nq = static_cast<std::size_t>(m.facet_quad_points());
  return m.facet_quad_weight(static_cast<int>(qp % nq)) *
         m.facet_measure(m.facets_with(BoundaryTag::gamma)[qp / nq]);
}

SparseMatrix weighted_mass(const Mesh& m, const std::vector<double>& c_int,
                           const std::vector<double>& c_bnd) {
  std::vector<Eigen::Triplet<double>> trip;
  if (!c_int.empty()) {
    std::vector<double> local(m.num_elements() * kernels::kMat);
    kernels::element_mass(m, c_int, local, kernels::Exec::serial);
    kernels::scatter_element_matrices(m, local, trip);
  }
  const auto& gf = m.facets_with(BoundaryTag::gamma);
  if (!c_bnd.empty() && !gf.empty()) {
    std::vector<double> local(gf.size() * 4);
    kernels::facet_mass(m, gf, c_bnd, local);
    kernels::scatter_facet_matrices(m, gf, local, trip);
  }
  const auto n = static_cast<Eigen::Index>(m.num_nodes());
  SparseMatrix out(n, n);
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

bool any_nonzero(const std::vector<double>& v) {
  return std::any_of(v.begin(), v.end(), [](double x) { return x != 0.0; });
}

// Reaction values (or derivatives) summed at every field point.
void reaction_fields(const VIProblem& prob, const FeFunction& u, bool deriv,
                     std::vector<double>& c_int, std::vector<double>& c_bnd) {
  const Mesh& m = prob.mesh();
  c_int.assign(field_size(m, FieldLocation::interior), 0.0);
  c_bnd.assign(field_size(m, FieldLocation::boundary), 0.0);
  if (prob.reactions.empty()) return;
  const auto ui = sample_function(u, FieldLocation::interior).values;
  const auto ub = sample_function(u, FieldLocation::boundary).values;
  for (const auto& r : prob.reactions) {
    const bool in = r->location() == FieldLocation::interior;
    auto& dst = in ? c_int : c_bnd;
    const auto& s = in ? ui : ub;
    for (std::size_t i = 0; i < dst.size(); ++i)
      dst[i] += deriv ? r->derivative(i, s[i]) : r->value(i, s[i]);
  }
}

}  // namespace

QuadratureField select_interior(const VIProblem& prob, const FeFunction& u,
                                SelectionRule rule) {
  if (!prob.f) return zero_field(prob.mesh(), FieldLocation::interior);
  return select(*prob.f, u, rule);
}

QuadratureField select_boundary(const VIProblem& prob, const FeFunction& u,
                                SelectionRule rule) {
  if (!prob.f_gamma) return zero_field(prob.mesh(), FieldLocation::boundary);
  return select(*prob.f_gamma, u, rule);
}

DualVector assemble_reactions(const VIProblem& prob, const FeFunction& u) {
  const Mesh& m = prob.mesh();
  DualVector out = DualVector::Zero(static_cast<Eigen::Index>(m.num_nodes()));
  if (prob.reactions.empty()) return out;
  std::vector<double> vi, vb;
  reaction_fields(prob, u, false, vi, vb);
  QuadratureField fi = zero_field(m, FieldLocation::interior);
  QuadratureField fb = zero_field(m, FieldLocation::boundary);
  fi.values = std::move(vi);
  fb.values = std::move(vb);
  out += assemble_source(fi, m);
  out += assemble_source(fb, m);
  return out;
}

DualVector residual_vector(const VIProblem& prob, const FeFunction& u,
                           const QuadratureField& eta,
                           const QuadratureField& zeta) {
  DualVector r = prob.op.apply(u);
  r += assemble_source(eta, prob.mesh());
  r += assemble_source(zeta, prob.mesh());
  r += assemble_reactions(prob, u);
  return r;
}

namespace {

// Complementarity residual of node i; d scales the constraint part.
inline double node_merit(const ConstraintSet& K, std::size_t i, double r,
                         double u, double d) {
  switch (K.kind) {
    case ConstraintKind::whole_space: return r;
    case ConstraintKind::obstacle: return std::min(r, d * (u - K.lo[i]));
    case ConstraintKind::box:
      return std::max(d * (u - K.hi[i]), std::min(r, d * (u - K.lo[i])));
  }
  return r;
}

double complementarity(const VIProblem& prob, const FeFunction& u,
                       const DualVector& r, const Eigen::VectorXd* scale,
                       bool l2) {
  const Mesh& m = prob.mesh();
  double acc = 0.0;
  for (std::size_t i = 0; i < m.num_nodes(); ++i) {
    if (m.is_dirichlet(i)) continue;
    const double d = scale ? (*scale)[static_cast<Eigen::Index>(i)] : 1.0;
    const double v = node_merit(prob.K, i, r[static_cast<Eigen::Index>(i)], u[i], d);
    acc = l2 ? acc + v * v : std::max(acc, std::abs(v));
  }
  return l2 ? std::sqrt(acc) : acc;
}

}  // namespace

double vi_residual(const VIProblem& prob, const FeFunction& u,
                   const QuadratureField& eta, const QuadratureField& zeta) {
  const double infeas = prob.K.infeasibility(u);
  if (infeas > 0.0) {
    std::ostringstream os;
    os << "vi_residual: iterate violates K by " << infeas;
    throw std::invalid_argument(os.str());
  }
  return complementarity(prob, u, residual_vector(prob, u, eta, zeta), nullptr,
                         false);
}

namespace {

constexpr double kSlopeCap = 1e4;

// Central-difference slope of the selected endpoint in s at every point.
std::vector<double> selection_slope(const IntervalPtr& f, const FeFunction& u,
                                    SelectionRule rule, FieldLocation loc) {
  const Mesh& m = u.mesh();
  std::vector<double> out(field_size(m, loc), 0.0);
  if (!f) return out;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Point x = field_point(m, loc, i);
    const double s = field_value(u, loc, i);
    const double h = 1e-6 * std::max(1.0, std::abs(s));
    const double gp = pick(f->eval(i, x, s + h), rule);
    const double gm = pick(f->eval(i, x, s - h), rule);
    double c = (gp - gm) / (2.0 * h);
    if (!std::isfinite(c)) c = 0.0;
    out[i] = std::clamp(c, -kSlopeCap, kSlopeCap);
  }
  return out;
}

struct InnerResult {
  FeFunction u;
  bool converged = false;
  int steps = 0;
  std::string message;
};

// Semismooth Newton for the single-valued VI
//   find u in K: R(u) = Au + load + C (u - u_ref) + reactions(u)
// satisfies nodal complementarity.
class InnerSolver {
 public:
  InnerSolver(const VIProblem& prob, DualVector load, SparseMatrix lin,
              FeFunction u_ref, Eigen::VectorXd scale)
      : prob_(prob),
        load_(std::move(load)),
        lin_(std::move(lin)),
        ref_(std::move(u_ref)),
        d_(std::move(scale)) {}

  DualVector residual(const FeFunction& u) const {
    DualVector r = prob_.op.apply(u) + load_;
    if (lin_.nonZeros() > 0) r += lin_ * (u.coeffs() - ref_.coeffs());
    r += assemble_reactions(prob_, u);
    return r;
  }

  InnerResult solve(FeFunction u, double tol, int max_steps,
                    std::vector<std::size_t>& active_sizes) const {
    InnerResult res;
    const Mesh& m = prob_.mesh();
    const ConstraintSet& K = prob_.K;
    DualVector r = residual(u);
    double merit = complementarity(prob_, u, r, &d_, true);
    const double eps_list[] = {prob_.op.eps(), 1e-6, 1e-4, 1e-2, 1e-1};
    for (; res.steps < max_steps; ++res.steps) {
      if (complementarity(prob_, u, r, nullptr, false) <= tol) {
        res.converged = true;
        break;
      }
      // Active sets from the current merit branches.
      const std::size_t n = m.num_nodes();
      std::vector<int> state(n, 0);  // 0 inactive, 1 at lower, 2 at upper, 3 fixed
      Eigen::VectorXd delta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
      std::size_t n_active = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        if (m.is_dirichlet(i)) {
          state[i] = 3;
          delta[ii] = -u[i];
          continue;
        }
        if (K.has_upper() && d_[ii] * (u[i] - K.hi[i]) >
                                 std::min(r[ii], d_[ii] * (u[i] - K.lo[i]))) {
          state[i] = 2;
          delta[ii] = K.hi[i] - u[i];
          ++n_active;
        } else if (K.has_lower() && d_[ii] * (u[i] - K.lo[i]) < r[ii]) {
          state[i] = 1;
          delta[ii] = K.lo[i] - u[i];
          ++n_active;
        }
      }
      active_sizes.push_back(n_active);

      bool accepted = false;
      for (double eps : eps_list) {
        Eigen::VectorXd step;
        if (!newton_direction(u, r, state, delta, eps, step)) continue;
        double alpha = 1.0;
        while (alpha >= 1e-8) {
          FeFunction trial(u.mesh_ptr(), u.coeffs() + alpha * step);
          trial = K.project(trial);
          const DualVector rt = residual(trial);
          const double mt = complementarity(prob_, trial, rt, &d_, true);
          if (std::isfinite(mt) && mt <= (1.0 - 1e-4 * alpha) * merit) {
            u = std::move(trial);
            r = rt;
            merit = mt;
            accepted = true;
            break;
          }
          alpha *= 0.5;
        }
        if (accepted) break;
      }
      if (!accepted) {
        res.message = "line search failed for every smoothing level";
        break;
      }
    }
    if (!res.converged &&
        complementarity(prob_, u, r, nullptr, false) <= tol)
      res.converged = true;
    if (!res.converged && res.message.empty())
      res.message = "Newton iteration limit reached";
    res.u = std::move(u);
    return res;
  }

 private:
  bool newton_direction(const FeFunction& u, const DualVector& r,
                        const std::vector<int>& state,
                        const Eigen::VectorXd& delta_fixed, double eps,
                        Eigen::VectorXd& step) const {
    const std::size_t n = state.size();
    SparseMatrix J = prob_.op.jacobian(u, eps);
    if (lin_.nonZeros() > 0) J += lin_;
    if (!prob_.reactions.empty()) {
      std::vector<double> ci, cb;
      reaction_fields(prob_, u, true, ci, cb);
      if (any_nonzero(ci) || any_nonzero(cb))
        J += weighted_mass(prob_.mesh(), ci, cb);
    }
    std::vector<Eigen::Index> map(n, -1);
    Eigen::Index ni = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (state[i] == 0) map[i] = ni++;
    step = delta_fixed;
    if (ni == 0) return true;
    const Eigen::VectorXd jd = J * delta_fixed;
    Eigen::VectorXd rhs(ni);
    std::vector<Eigen::Triplet<double>> trip;
    for (Eigen::Index c = 0; c < J.outerSize(); ++c) {
      const Eigen::Index mc = map[static_cast<std::size_t>(c)];
      if (mc < 0) continue;
      for (SparseMatrix::InnerIterator it(J, c); it; ++it) {
        const Eigen::Index mr = map[static_cast<std::size_t>(it.row())];
        if (mr >= 0) trip.emplace_back(mr, mc, it.value());
      }
    }
    for (std::size_t i = 0; i < n; ++i)
      if (map[i] >= 0) {
        const auto ii = static_cast<Eigen::Index>(i);
        rhs[map[i]] = -r[ii] - jd[ii];
      }
    SparseMatrix Jr(ni, ni);
    Jr.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(Jr);
    if (ldlt.info() != Eigen::Success) return false;
    const Eigen::VectorXd& D = ldlt.vectorD();
    const double dmax = D.cwiseAbs().maxCoeff();
    if (!(dmax > 0.0) || !std::isfinite(dmax)) return false;
    if (D.cwiseAbs().minCoeff() <= 1e-14 * dmax) return false;
    const Eigen::VectorXd x = ldlt.solve(rhs);
    if (ldlt.info() != Eigen::Success || !x.allFinite()) return false;
    for (std::size_t i = 0; i < n; ++i)
      if (map[i] >= 0) step[static_cast<Eigen::Index>(i)] = x[map[i]];
    return true;
  }

  const VIProblem& prob_;
  DualVector load_;
  SparseMatrix lin_;
  FeFunction ref_;
  Eigen::VectorXd d_;
};

Eigen::VectorXd laplace_diagonal(const MeshPtr& mesh) {
  DoublePhaseOperator lap(ExponentData::constant(mesh, 2.0, 2.0, 0.0), 0.0,
                          kernels::Exec::serial);
  const SparseMatrix j = lap.jacobian(fe_constant(mesh, 0.0), 0.0);
  Eigen::VectorXd d = j.diagonal();
  for (Eigen::Index i = 0; i < d.size(); ++i)
    if (!(d[i] > 0.0)) d[i] = 1.0;
  return d;
}

}  // namespace

SolveResult solve_vi(const VIProblem& prob, const SolveOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!(opts.tol > 0.0)) throw std::invalid_argument("tol must be positive");
  prob.validate();
  const Mesh& m = prob.mesh();
  const MeshPtr& mp = prob.mesh_ptr();

  SolveResult out;
  SolveReport& rep = out.report;
  rep.selection = opts.selection;

  FeFunction u = opts.initial ? *opts.initial : fe_constant(mp, 0.0);
  if (u.mesh_ptr().get() != &m)
    throw MeshError("initial guess lives on a different mesh");
  u = prob.K.project(u);

  const Eigen::VectorXd d = laplace_diagonal(mp);
  const double inner_tol = 0.1 * opts.tol;
  int budget = opts.max_iter;

  QuadratureField eta = select_interior(prob, u, opts.selection);
  QuadratureField zeta = select_boundary(prob, u, opts.selection);
  double res = vi_residual(prob, u, eta, zeta);
  FeFunction best = u;
  QuadratureField best_eta = eta, best_zeta = zeta;
  double best_res = res;

  for (int k = 0; k < opts.max_outer && res > opts.tol && budget > 0; ++k) {
    const DualVector load =
        assemble_source(eta, m) + assemble_source(zeta, m);
    std::vector<double> ci =
        selection_slope(prob.f, u, opts.selection, FieldLocation::interior);
    std::vector<double> cb =
        selection_slope(prob.f_gamma, u, opts.selection, FieldLocation::boundary);

    auto run = [&](const std::vector<double>& a, const std::vector<double>& b) {
      SparseMatrix lin = (any_nonzero(a) || any_nonzero(b))
                             ? weighted_mass(m, a, b)
                             : SparseMatrix(static_cast<Eigen::Index>(m.num_nodes()),
                                            static_cast<Eigen::Index>(m.num_nodes()));
      InnerSolver inner(prob, load, std::move(lin), u, d);
      InnerResult ir = inner.solve(u, inner_tol, budget, rep.active_set_sizes);
      budget -= ir.steps;
      rep.iterations += ir.steps;
      return ir;
    };
    InnerResult ir = run(ci, cb);
    const bool negative =
        std::any_of(ci.begin(), ci.end(), [](double c) { return c < 0.0; }) ||
        std::any_of(cb.begin(), cb.end(), [](double c) { return c < 0.0; });
    if (!ir.converged && negative && budget > 0) {
      // Indefinite linearization: fall back to its monotone part.
      for (double& c : ci) c = std::max(c, 0.0);
      for (double& c : cb) c = std::max(c, 0.0);
      ir = run(ci, cb);
    }
    ++rep.outer_iterations;
    double update = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
      update = std::max(update, std::abs(ir.u[i] - u[i]));
    u = std::move(ir.u);
    eta = select_interior(prob, u, opts.selection);
    zeta = select_boundary(prob, u, opts.selection);
    res = vi_residual(prob, u, eta, zeta);
    rep.update_history.push_back(update);
    rep.residual_history.push_back(res);
    if (res < best_res) {
      best = u;
      best_eta = eta;
      best_zeta = zeta;
      best_res = res;
    }
    if (!ir.converged) rep.message = ir.message;
  }

  rep.converged = best_res <= opts.tol;
  if (rep.converged)
    rep.message = "converged";
  else if (rep.message.empty())
    rep.message = budget <= 0 ? "iteration limit reached"
                              : "outer selection loop limit reached";
  rep.residual = best_res;
  out.u = std::move(best);
  out.eta = std::move(best_eta);
  out.zeta = std::move(best_zeta);
  rep.wall_seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
  return out;
}

namespace {

// min over eta in f(x, u) of int eta (u - u0), endpoint-wise at each point.
double min_selection_pairing(const IntervalPtr& f, const FeFunction& u,
                             const FeFunction& u0, FieldLocation loc) {
  if (!f) return 0.0;
  const Mesh& m = u.mesh();
  double acc = 0.0;
  const std::size_t n = field_size(m, loc);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = field_value(u, loc, i);
    const double dv = s - field_value(u0, loc, i);
    const Interval iv = f->eval(i, field_point(m, loc, i), s);
    acc += point_weight(m, loc, i) * std::min(iv.lo * dv, iv.hi * dv);
  }
  return acc;
}

}  // namespace

CoercivityReport check_coercivity(const VIProblem& prob, const FeFunction& u0,
                                  const std::vector<double>& radii,
                                  int samples_per_radius, std::uint64_t seed) {
  prob.validate();
  if (prob.K.infeasibility(u0) > 0.0)
    throw std::invalid_argument("reference point u0 is not in K");
  if (samples_per_radius < 1)
    throw std::invalid_argument("need at least one sample per radius");
  const MeshPtr& mp = prob.mesh_ptr();
  const Mesh& m = *mp;
  const ExponentData& ed = prob.op.exponents();
  const Modular mod = Modular::sobolev();

  CoercivityReport rep;
  bool all_positive = true;
  for (double R : radii) {
    if (!(R > 0.0)) throw std::invalid_argument("radii must be positive");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    CoercivityRow row;
    row.radius = R;
    row.min_value = std::numeric_limits<double>::infinity();
    for (int sidx = 0; sidx < samples_per_radius; ++sidx) {
      FeFunction w(mp);
      for (std::size_t i = 0; i < w.size(); ++i)
        w[i] = m.is_dirichlet(i) ? 0.0 : gauss(rng);
      auto norm_at = [&](double t) {
        FeFunction tw(mp, t * w.coeffs());
        return luxemburg_norm(mod, ed, prob.K.project(tw));
      };
      // Bracket and bisect the scaling t with ||P_K(t w)|| = R.
      double lo = 0.0, hi = 1.0;
      int grow = 0;
      while (norm_at(hi) < R && grow++ < 200) {
        lo = hi;
        hi *= 2.0;
      }
      if (norm_at(hi) < R) continue;
      double t = hi, nt = norm_at(hi);
      for (int it = 0; it < 200 && std::abs(nt - R) > 1e-6 * R; ++it) {
        t = 0.5 * (lo + hi);
        nt = norm_at(t);
        (nt < R ? lo : hi) = t;
      }
      if (std::abs(nt - R) > 1e-6 * R) continue;
      FeFunction u = prob.K.project(FeFunction(mp, t * w.coeffs()));
      const Eigen::VectorXd du = u.coeffs() - u0.coeffs();
      double v = prob.op.apply(u).dot(du);
      v += assemble_reactions(prob, u).dot(du);
      v += min_selection_pairing(prob.f, u, u0, FieldLocation::interior);
      v += min_selection_pairing(prob.f_gamma, u, u0, FieldLocation::boundary);
      row.min_value = std::min(row.min_value, v);
      ++row.samples;
    }
    if (row.samples == 0) {
      std::ostringstream os;
      os << "no feasible sample found at radius " << R;
      throw std::runtime_error(os.str());
    }
    row.positive = row.min_value > 0.0;
    all_positive = all_positive && row.positive;
    rep.rows.push_back(row);
  }
  rep.verdict = all_positive ? "no violation found" : "violation found";
  return rep;
}

VIProblem build_auxiliary(const VIProblem& prob, const TruncationData& td) {
  if (td.lower.mesh_ptr().get() != &prob.mesh())
    throw MeshError("truncation data lives on a different mesh");
  auto shared = std::make_shared<const TruncationData>(td);
  VIProblem aux = prob;
  aux.f = truncate_multifunction(prob.f, *shared);
  aux.f_gamma = truncate_multifunction(prob.f_gamma, *shared);
  aux.reactions.push_back(penalty_term(shared, prob.op.exponents()));
  for (std::size_t i = 0; i < shared->extra_lower.size(); ++i) {
    aux.reactions.push_back(
        compensator_term(shared, CompensatorKind::T_lower, i));
    aux.reactions.push_back(
        compensator_term(shared, CompensatorKind::U_lower, i));
  }
  for (std::size_t j = 0; j < shared->extra_upper.size(); ++j) {
    aux.reactions.push_back(
        compensator_term(shared, CompensatorKind::T_upper, j));
    aux.reactions.push_back(
        compensator_term(shared, CompensatorKind::U_upper, j));
  }
  return aux;
}

}  // namespace dpvi
