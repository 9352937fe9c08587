#include "dpvi/kernels.hpp"

#include <cmath>

namespace dpvi::kernels {

namespace {

struct ElementGrad {
  double g[2];
  double norm;
};

inline ElementGrad grad_on(const Mesh& mesh, const Eigen::VectorXd& u,
                           std::size_t e) {
  const auto v = mesh.element(e);
  ElementGrad r{{0.0, 0.0}, 0.0};
  for (std::size_t a = 0; a < v.size(); ++a)
    for (int d = 0; d < 2; ++d)
      r.g[d] += mesh.basis_grad(e, static_cast<int>(a), d) * u[v[a]];
  r.norm = std::hypot(r.g[0], r.g[1]);
  return r;
}

// Runs body(e) for every element, serially or with a static OpenMP schedule.
template <class Body>
void for_each_element(std::size_t ne, Exec exec, Body&& body) {
  const long n = static_cast<long>(ne);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (long e = 0; e < n; ++e) body(static_cast<std::size_t>(e));
  } else {
    for (long e = 0; e < n; ++e) body(static_cast<std::size_t>(e));
  }
}

}  // namespace

void element_flux(const Mesh& mesh, const ExponentData& ed,
                  const Eigen::VectorXd& u, std::span<double> out, Exec exec) {
  const int nq = mesh.quad_points_per_element();
  const int nv = mesh.verts_per_element();
  for_each_element(mesh.num_elements(), exec, [&](std::size_t e) {
    double* loc = &out[e * kVec];
    for (int a = 0; a < kVec; ++a) loc[a] = 0.0;
    const ElementGrad g = grad_on(mesh, u, e);
    // |t|^{p-2} t extends continuously by zero at t = 0.
    if (g.norm == 0.0) return;
    double coeff = 0.0;
    for (int k = 0; k < nq; ++k) {
      const std::size_t i = e * nq + k;
      coeff += mesh.quad_weight(k) *
               (std::pow(g.norm, ed.p.values[i] - 2.0) +
                ed.mu.values[i] * std::pow(g.norm, ed.q.values[i] - 2.0));
    }
    coeff *= mesh.measure(e);
    for (int a = 0; a < nv; ++a)
      loc[a] = coeff * (g.g[0] * mesh.basis_grad(e, a, 0) +
                        g.g[1] * mesh.basis_grad(e, a, 1));
  });
}

void element_energy(const Mesh& mesh, const ExponentData& ed,
                    const Eigen::VectorXd& u, std::span<double> out,
                    Exec exec) {
  const int nq = mesh.quad_points_per_element();
  for_each_element(mesh.num_elements(), exec, [&](std::size_t e) {
    const ElementGrad g = grad_on(mesh, u, e);
    double s = 0.0;
    if (g.norm > 0.0) {
      for (int k = 0; k < nq; ++k) {
        const std::size_t i = e * nq + k;
        const double p = ed.p.values[i], q = ed.q.values[i];
        s += mesh.quad_weight(k) * (std::pow(g.norm, p) / p +
                                    ed.mu.values[i] * std::pow(g.norm, q) / q);
      }
    }
    out[e] = mesh.measure(e) * s;
  });
}

void element_jacobian(const Mesh& mesh, const ExponentData& ed,
                      const Eigen::VectorXd& u, double eps,
                      std::span<double> out, Exec exec) {
  const int nq = mesh.quad_points_per_element();
  const int nv = mesh.verts_per_element();
  for_each_element(mesh.num_elements(), exec, [&](std::size_t e) {
    double* loc = &out[e * kMat];
    for (int a = 0; a < kMat; ++a) loc[a] = 0.0;
    const ElementGrad g = grad_on(mesh, u, e);
    const double t2 = g.norm * g.norm + eps * eps;
    const double t = std::sqrt(t2);
    double alpha = 0.0, beta = 0.0;
    for (int k = 0; k < nq; ++k) {
      const std::size_t i = e * nq + k;
      const double p = ed.p.values[i], q = ed.q.values[i], mu = ed.mu.values[i];
      double al, be;
      if (t == 0.0) {
        al = (p == 2.0 ? 1.0 : 0.0) + (q == 2.0 ? mu : 0.0);
        be = 0.0;
      } else {
        al = std::pow(t, p - 2.0) + mu * std::pow(t, q - 2.0);
        be = (p - 2.0) * std::pow(t, p - 4.0) +
             mu * (q - 2.0) * std::pow(t, q - 4.0);
      }
      alpha += mesh.quad_weight(k) * al;
      beta += mesh.quad_weight(k) * be;
    }
    const double m = mesh.measure(e);
    for (int a = 0; a < nv; ++a) {
      const double ga0 = mesh.basis_grad(e, a, 0), ga1 = mesh.basis_grad(e, a, 1);
      const double gdota = g.g[0] * ga0 + g.g[1] * ga1;
      for (int b = 0; b < nv; ++b) {
        const double gb0 = mesh.basis_grad(e, b, 0),
                     gb1 = mesh.basis_grad(e, b, 1);
        const double gdotb = g.g[0] * gb0 + g.g[1] * gb1;
        loc[a * kVec + b] =
            m * (alpha * (ga0 * gb0 + ga1 * gb1) + beta * gdota * gdotb);
      }
    }
  });
}

void element_load(const Mesh& mesh, std::span<const double> c,
                  std::span<double> out, Exec exec) {
  const int nq = mesh.quad_points_per_element();
  const int nv = mesh.verts_per_element();
  for_each_element(mesh.num_elements(), exec, [&](std::size_t e) {
    double* loc = &out[e * kVec];
    for (int a = 0; a < kVec; ++a) loc[a] = 0.0;
    for (int k = 0; k < nq; ++k) {
      const double wc = mesh.quad_weight(k) * c[e * nq + k];
      for (int a = 0; a < nv; ++a) loc[a] += wc * mesh.quad_basis(k, a);
    }
    for (int a = 0; a < nv; ++a) loc[a] *= mesh.measure(e);
  });
}

void element_mass(const Mesh& mesh, std::span<const double> c,
                  std::span<double> out, Exec exec) {
  const int nq = mesh.quad_points_per_element();
  const int nv = mesh.verts_per_element();
  for_each_element(mesh.num_elements(), exec, [&](std::size_t e) {
    double* loc = &out[e * kMat];
    for (int a = 0; a < kMat; ++a) loc[a] = 0.0;
    for (int k = 0; k < nq; ++k) {
      const double wc = mesh.quad_weight(k) * c[e * nq + k];
      for (int a = 0; a < nv; ++a)
        for (int b = 0; b < nv; ++b)
          loc[a * kVec + b] += wc * mesh.quad_basis(k, a) * mesh.quad_basis(k, b);
    }
    for (int a = 0; a < kMat; ++a) loc[a] *= mesh.measure(e);
  });
}

void facet_load(const Mesh& mesh, std::span<const std::size_t> facets,
                std::span<const double> c, std::span<double> out) {
  const int nq = mesh.facet_quad_points();
  const int nv = mesh.verts_per_facet();
  for (std::size_t i = 0; i < facets.size(); ++i) {
    double* loc = &out[i * 2];
    loc[0] = loc[1] = 0.0;
    for (int k = 0; k < nq; ++k) {
      const double wc = mesh.facet_quad_weight(k) * c[i * nq + k];
      for (int a = 0; a < nv; ++a) loc[a] += wc * mesh.facet_quad_basis(k, a);
    }
    for (int a = 0; a < nv; ++a) loc[a] *= mesh.facet_measure(facets[i]);
  }
}

void facet_mass(const Mesh& mesh, std::span<const std::size_t> facets,
                std::span<const double> c, std::span<double> out) {
  const int nq = mesh.facet_quad_points();
  const int nv = mesh.verts_per_facet();
  for (std::size_t i = 0; i < facets.size(); ++i) {
    double* loc = &out[i * 4];
    for (int a = 0; a < 4; ++a) loc[a] = 0.0;
    for (int k = 0; k < nq; ++k) {
      const double wc = mesh.facet_quad_weight(k) * c[i * nq + k];
      for (int a = 0; a < nv; ++a)
        for (int b = 0; b < nv; ++b)
          loc[a * 2 + b] +=
              wc * mesh.facet_quad_basis(k, a) * mesh.facet_quad_basis(k, b);
    }
    for (int a = 0; a < 4; ++a) loc[a] *= mesh.facet_measure(facets[i]);
  }
}

void scatter_elements(const Mesh& mesh, std::span<const double> local,
                      Eigen::VectorXd& global) {
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const auto v = mesh.element(e);
    for (std::size_t a = 0; a < v.size(); ++a) global[v[a]] += local[e * kVec + a];
  }
}

void scatter_facets(const Mesh& mesh, std::span<const std::size_t> facets,
                    std::span<const double> local, Eigen::VectorXd& global) {
  for (std::size_t i = 0; i < facets.size(); ++i) {
    const auto v = mesh.facet(facets[i]);
    for (std::size_t a = 0; a < v.size(); ++a) global[v[a]] += local[i * 2 + a];
  }
}

void scatter_element_matrices(const Mesh& mesh, std::span<const double> local,
                              std::vector<Eigen::Triplet<double>>& triplets) {
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const auto v = mesh.element(e);
    for (std::size_t a = 0; a < v.size(); ++a)
      for (std::size_t b = 0; b < v.size(); ++b)
        triplets.emplace_back(v[a], v[b], local[e * kMat + a * kVec + b]);
  }
}

void scatter_facet_matrices(const Mesh& mesh,
                            std::span<const std::size_t> facets,
                            std::span<const double> local,
                            std::vector<Eigen::Triplet<double>>& triplets) {
  for (std::size_t i = 0; i < facets.size(); ++i) {
    const auto v = mesh.facet(facets[i]);
    for (std::size_t a = 0; a < v.size(); ++a)
      for (std::size_t b = 0; b < v.size(); ++b)
        triplets.emplace_back(v[a], v[b], local[i * 4 + a * 2 + b]);
  }
}

}  // namespace dpvi::kernels
