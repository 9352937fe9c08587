#include "dpvi/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dpvi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double critical(double p, int n, int numerator_shift) {
  if (p >= n) return kInf;
  return (n - numerator_shift) * p / (n - p);
}

}  // namespace

ExponentData ExponentData::sample(const MeshPtr& mesh, const Expr& p,
                                  const Expr& q, const Expr& mu) {
  ExponentData ed;
  ed.mesh = mesh;
  ed.dimension = mesh->dim();
  ed.p = sample_interior(p, *mesh);
  ed.q = sample_interior(q, *mesh);
  ed.mu = sample_interior(mu, *mesh);
  ed.p_star = QuadratureField::interior(*mesh);
  ed.p_lower = QuadratureField::interior(*mesh);
  for (std::size_t i = 0; i < ed.p.values.size(); ++i) {
    ed.p_star.values[i] = critical(ed.p.values[i], ed.dimension, 0);
    ed.p_lower.values[i] = critical(ed.p.values[i], ed.dimension, 1);
  }
  const auto [pmin, pmax] =
      std::minmax_element(ed.p.values.begin(), ed.p.values.end());
  const auto [qmin, qmax] =
      std::minmax_element(ed.q.values.begin(), ed.q.values.end());
  ed.p_min = *pmin;
  ed.p_max = *pmax;
  ed.q_min = *qmin;
  ed.q_max = *qmax;
  return ed;
}

ExponentData ExponentData::constant(const MeshPtr& mesh, double p, double q,
                                    double mu) {
  return sample(mesh, constant_expression(p), constant_expression(q),
                constant_expression(mu));
}

ExponentReport validate_exponents(const ExponentData& ed) {
  ExponentReport report;
  const Mesh& mesh = *ed.mesh;
  const int nq = mesh.quad_points_per_element();
  const double n = ed.dimension;
  for (std::size_t i = 0; i < ed.p.values.size(); ++i) {
    const Point loc = mesh.quad_point(i / nq, static_cast<int>(i % nq));
    const double p = ed.p.values[i], q = ed.q.values[i], mu = ed.mu.values[i];
    auto flag = [&](const char* what, double lhs, double rhs) {
      report.violations.push_back({what, i, loc, lhs, rhs});
    };
    if (!(p > 1.0)) flag("1 < p", 1.0, p);
    if (!(p < n)) flag("p < N", p, n);
    if (!(p < q)) flag("p < q", p, q);
    if (!(q < ed.p_star.values[i])) flag("q < p*", q, ed.p_star.values[i]);
    if (!(mu >= 0.0)) flag("mu >= 0", mu, 0.0);
  }
  return report;
}

const char* to_string(ModularKind kind) {
  switch (kind) {
    case ModularKind::lebesgue_H: return "lebesgue_H";
    case ModularKind::sobolev_H: return "sobolev_H";
    case ModularKind::variable_lp: return "variable_lp";
    case ModularKind::weighted_lq: return "weighted_lq";
  }
  return "?";
}

double modular(const Modular& m, const ExponentData& ed, const FeFunction& u,
               double scale) {
  const Mesh& mesh = u.mesh();
  if (ed.mesh.get() != &mesh)
    throw std::invalid_argument("exponent data sampled on a different mesh");
  if (m.kind == ModularKind::variable_lp && !m.r.matches(mesh))
    throw std::invalid_argument("variable_lp exponent field layout mismatch");
  const int nq = mesh.quad_points_per_element();
  double total = 0.0;
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    double grad_norm = 0.0;
    if (m.kind == ModularKind::sobolev_H) {
      const auto g = u.gradient(e);
      grad_norm = std::fabs(scale) * std::hypot(g[0], g[1]);
    }
    double local = 0.0;
    for (int k = 0; k < nq; ++k) {
      const std::size_t i = e * nq + k;
      const double a = std::fabs(scale * u.at_quad(e, k));
      const double p = ed.p.values[i], q = ed.q.values[i], mu = ed.mu.values[i];
      double v = 0.0;
      switch (m.kind) {
        case ModularKind::lebesgue_H:
          v = std::pow(a, p) + mu * std::pow(a, q);
          break;
        case ModularKind::sobolev_H:
          v = std::pow(grad_norm, p) + mu * std::pow(grad_norm, q) +
              std::pow(a, p) + mu * std::pow(a, q);
          break;
        case ModularKind::variable_lp:
          v = std::pow(a, m.r.values[i]);
          break;
        case ModularKind::weighted_lq:
          v = mu * std::pow(a, q);
          break;
      }
      local += mesh.quad_weight(k) * v;
    }
    total += mesh.measure(e) * local;
  }
  return total;
}

double luxemburg_norm(const Modular& m, const ExponentData& ed,
                      const FeFunction& u, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (u.coeffs().isZero(0.0)) return 0.0;
  auto rho = [&](double lambda) {
    const double v = modular(m, ed, u, 1.0 / lambda);
    if (!std::isfinite(v)) throw std::runtime_error("non-finite modular");
    return v;
  };
  if (rho(1.0) == 0.0) return 0.0;  // seminorm case: mu vanishes on supp u

  // lo: rho(u/lo) > 1, hi: rho(u/hi) <= 1.
  double lo = 1.0, hi = 1.0;
  if (rho(1.0) > 1.0) {
    while (rho(hi) > 1.0) {
      lo = hi;
      hi *= 2.0;
    }
  } else {
    while (rho(lo) <= 1.0) {
      hi = lo;
      lo *= 0.5;
      if (lo == 0.0) throw std::runtime_error("norm bracketing underflow");
    }
  }
  for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (rho(mid) > 1.0)
      lo = mid;
    else
      hi = mid;
  }
  const double lambda = 0.5 * (lo + hi);
  if (std::fabs(rho(lambda) - 1.0) > tol)
    throw std::runtime_error("Luxemburg norm bisection missed tolerance");
  return lambda;
}

}  // namespace dpvi
