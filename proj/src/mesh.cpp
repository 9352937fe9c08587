#include "dpvi/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace dpvi {

namespace {

// Gauss-Legendre, three points on [0,1]; exact through degree 5.
constexpr double kGauss3Nodes[3] = {0.1127016653792583114820735,
                                    0.5,
                                    0.8872983346207416885179265};
constexpr double kGauss3Weights[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

// Dunavant six-point rule on the reference triangle; exact through degree 4.
constexpr double kTriA1 = 0.445948490915964886318329;
constexpr double kTriB1 = 0.108103018168070227363342;
constexpr double kTriW1 = 0.223381589678011465944691;
constexpr double kTriA2 = 0.091576213509770743459571;
constexpr double kTriB2 = 0.816847572980458513080857;
constexpr double kTriW2 = 0.109951743655321867638642;

}  // namespace

Mesh::Mesh(const MeshSpec& spec) : dim_(spec.dim), n_(spec.subdivisions) {
  if (dim_ != 1 && dim_ != 2) throw MeshError("dimension must be 1 or 2");
  if (n_ < 1) throw MeshError("subdivisions must be at least 1");
  const double h = 1.0 / n_;

  if (dim_ == 1) {
    for (int i = 0; i <= n_; ++i) nodes_.push_back({i * h, 0.0});
    for (int i = 0; i < n_; ++i) {
      elements_.push_back(i);
      elements_.push_back(i + 1);
    }
    for (int k = 0; k < 3; ++k) {
      qw_.push_back(kGauss3Weights[k]);
      qphi_.insert(qphi_.end(), {1.0 - kGauss3Nodes[k], kGauss3Nodes[k], 0.0});
    }
    facets_ = {0, n_};
    fw_ = {1.0};
    fphi_ = {1.0, 0.0};
  } else {
    const int m = n_ + 1;
    for (int j = 0; j <= n_; ++j)
      for (int i = 0; i <= n_; ++i) nodes_.push_back({i * h, j * h});
    for (int j = 0; j < n_; ++j) {
      for (int i = 0; i < n_; ++i) {
        const int n0 = j * m + i, n1 = n0 + 1, n2 = n0 + m, n3 = n2 + 1;
        elements_.insert(elements_.end(), {n0, n1, n3});
        elements_.insert(elements_.end(), {n0, n3, n2});
      }
    }
    const double a[2] = {kTriA1, kTriA2};
    const double b[2] = {kTriB1, kTriB2};
    const double w[2] = {kTriW1, kTriW2};
    for (int g = 0; g < 2; ++g) {
      const double bary[3][3] = {{a[g], a[g], b[g]},
                                 {a[g], b[g], a[g]},
                                 {b[g], a[g], a[g]}};
      for (const auto& l : bary) {
        qw_.push_back(w[g]);
        qphi_.insert(qphi_.end(), {l[0], l[1], l[2]});
      }
    }
    // Bottom, right, top, left; each edge oriented counterclockwise.
    for (int i = 0; i < n_; ++i) facets_.insert(facets_.end(), {i, i + 1});
    for (int j = 0; j < n_; ++j)
      facets_.insert(facets_.end(), {j * m + n_, (j + 1) * m + n_});
    for (int i = n_; i > 0; --i)
      facets_.insert(facets_.end(), {n_ * m + i, n_ * m + i - 1});
    for (int j = n_; j > 0; --j)
      facets_.insert(facets_.end(), {j * m, (j - 1) * m});
    for (int k = 0; k < 3; ++k) {
      fw_.push_back(kGauss3Weights[k]);
      fphi_.insert(fphi_.end(), {1.0 - kGauss3Nodes[k], kGauss3Nodes[k]});
    }
  }

  const int nv = verts_per_element();
  const std::size_t ne = elements_.size() / nv;
  measure_.resize(ne);
  grads_.assign(ne * kMaxVerts * 2, 0.0);
  qpts_.resize(ne * qw_.size());
  for (std::size_t e = 0; e < ne; ++e) {
    const int* v = &elements_[e * nv];
    if (dim_ == 1) {
      const double len = nodes_[v[1]].x - nodes_[v[0]].x;
      measure_[e] = len;
      grads_[(e * kMaxVerts + 0) * 2] = -1.0 / len;
      grads_[(e * kMaxVerts + 1) * 2] = 1.0 / len;
    } else {
      const Point& p0 = nodes_[v[0]];
      const Point& p1 = nodes_[v[1]];
      const Point& p2 = nodes_[v[2]];
      const double det = (p1.x - p0.x) * (p2.y - p0.y) -
                         (p2.x - p0.x) * (p1.y - p0.y);
      measure_[e] = 0.5 * det;
      const double g[3][2] = {{p1.y - p2.y, p2.x - p1.x},
                              {p2.y - p0.y, p0.x - p2.x},
                              {p0.y - p1.y, p1.x - p0.x}};
      for (int a = 0; a < 3; ++a)
        for (int d = 0; d < 2; ++d)
          grads_[(e * kMaxVerts + a) * 2 + d] = g[a][d] / det;
    }
    if (!(measure_[e] > 0.0)) throw MeshError("degenerate element");
    for (std::size_t k = 0; k < qw_.size(); ++k) {
      Point p;
      for (int a = 0; a < nv; ++a) {
        const double phi = qphi_[k * kMaxVerts + a];
        p.x += phi * nodes_[v[a]].x;
        p.y += phi * nodes_[v[a]].y;
      }
      qpts_[e * qw_.size() + k] = p;
    }
  }

  const int fv = verts_per_facet();
  const std::size_t nf = facets_.size() / fv;
  dirichlet_.assign(nodes_.size(), 0);
  for (std::size_t f = 0; f < nf; ++f) {
    const int* v = &facets_[f * fv];
    Point mid;
    double len = 1.0;
    if (dim_ == 1) {
      mid = nodes_[v[0]];
    } else {
      mid = {0.5 * (nodes_[v[0]].x + nodes_[v[1]].x),
             0.5 * (nodes_[v[0]].y + nodes_[v[1]].y)};
      len = std::hypot(nodes_[v[1]].x - nodes_[v[0]].x,
                       nodes_[v[1]].y - nodes_[v[0]].y);
    }
    facet_measure_.push_back(len);
    const bool is_gamma = !spec.gamma_predicate.empty() &&
                          spec.gamma_predicate(mid.x, mid.y) > 0.0;
    facet_tags_.push_back(is_gamma ? BoundaryTag::gamma : BoundaryTag::gamma0);
    if (is_gamma) {
      gamma_facets_.push_back(f);
    } else {
      gamma0_facets_.push_back(f);
      for (int a = 0; a < fv; ++a) dirichlet_[v[a]] = 1;
    }
  }
}

Point Mesh::facet_quad_point(std::size_t f, int k) const {
  const auto v = facet(f);
  if (dim_ == 1) return nodes_[v[0]];
  const double t0 = fphi_[k * 2], t1 = fphi_[k * 2 + 1];
  return {t0 * nodes_[v[0]].x + t1 * nodes_[v[1]].x,
          t0 * nodes_[v[0]].y + t1 * nodes_[v[1]].y};
}

std::size_t Mesh::num_free_nodes() const {
  return static_cast<std::size_t>(
      std::count(dirichlet_.begin(), dirichlet_.end(), 0));
}

MeshPtr build_mesh(const MeshSpec& spec) {
  return std::make_shared<const Mesh>(spec);
}

FeFunction::FeFunction(MeshPtr mesh)
    : mesh_(std::move(mesh)),
      c_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh_->num_nodes()))) {}

FeFunction::FeFunction(MeshPtr mesh, Eigen::VectorXd coeffs)
    : mesh_(std::move(mesh)), c_(std::move(coeffs)) {
  if (static_cast<std::size_t>(c_.size()) != mesh_->num_nodes())
    throw MeshError("coefficient vector length differs from node count");
}

double FeFunction::at_quad(std::size_t e, int k) const {
  const auto v = mesh_->element(e);
  double s = 0.0;
  for (std::size_t a = 0; a < v.size(); ++a)
    s += mesh_->quad_basis(k, static_cast<int>(a)) * c_[v[a]];
  return s;
}

double FeFunction::at_facet_quad(std::size_t f, int k) const {
  const auto v = mesh_->facet(f);
  double s = 0.0;
  for (std::size_t a = 0; a < v.size(); ++a)
    s += mesh_->facet_quad_basis(k, static_cast<int>(a)) * c_[v[a]];
  return s;
}

std::array<double, 2> FeFunction::gradient(std::size_t e) const {
  const auto v = mesh_->element(e);
  std::array<double, 2> g{0.0, 0.0};
  for (std::size_t a = 0; a < v.size(); ++a)
    for (int d = 0; d < 2; ++d)
      g[d] += mesh_->basis_grad(e, static_cast<int>(a), d) * c_[v[a]];
  return g;
}

bool FeFunction::in_dirichlet_subspace() const {
  for (std::size_t i = 0; i < size(); ++i)
    if (mesh_->is_dirichlet(i) && (*this)[i] != 0.0) return false;
  return true;
}

QuadratureField QuadratureField::interior(const Mesh& mesh, double fill) {
  QuadratureField f;
  f.location = FieldLocation::interior;
  f.values.assign(mesh.num_quad_points(), fill);
  return f;
}

QuadratureField QuadratureField::boundary(const Mesh& mesh, BoundaryTag tag,
                                          double fill) {
  QuadratureField f;
  f.location = FieldLocation::boundary;
  f.facets = mesh.facets_with(tag);
  f.values.assign(f.facets.size() * mesh.facet_quad_points(), fill);
  return f;
}

bool QuadratureField::matches(const Mesh& mesh) const {
  if (location == FieldLocation::interior)
    return values.size() == mesh.num_quad_points();
  for (std::size_t f : facets)
    if (f >= mesh.num_facets()) return false;
  return values.size() == facets.size() * mesh.facet_quad_points();
}

QuadratureField sample_interior(const Expr& expr, const Mesh& mesh) {
  QuadratureField f = QuadratureField::interior(mesh);
  const int nq = mesh.quad_points_per_element();
  for (std::size_t e = 0; e < mesh.num_elements(); ++e)
    for (int k = 0; k < nq; ++k) {
      const Point p = mesh.quad_point(e, k);
      f.values[e * nq + k] = expr(p.x, p.y);
    }
  return f;
}

FeFunction fe_interpolate(const Expr& expr, const MeshPtr& mesh) {
  FeFunction u(mesh);
  for (std::size_t i = 0; i < mesh->num_nodes(); ++i)
    u[i] = expr(mesh->node(i).x, mesh->node(i).y);
  return u;
}

FeFunction fe_constant(const MeshPtr& mesh, double value) {
  return FeFunction(mesh, Eigen::VectorXd::Constant(
                              static_cast<Eigen::Index>(mesh->num_nodes()),
                              value));
}

void require_same_mesh(const FeFunction& u, const FeFunction& v) {
  if (u.mesh_ptr() != v.mesh_ptr())
    throw MeshError("functions live on different meshes");
}

FeFunction lattice_op(const FeFunction& u, const FeFunction& v,
                      LatticeKind kind) {
  require_same_mesh(u, v);
  FeFunction w(u.mesh_ptr());
  for (std::size_t i = 0; i < u.size(); ++i)
    w[i] = kind == LatticeKind::meet ? std::min(u[i], v[i])
                                     : std::max(u[i], v[i]);
  return w;
}

QuadratureField trace(const FeFunction& u, BoundaryTag tag) {
  const Mesh& mesh = u.mesh();
  if (mesh.facets_with(tag).empty())
    throw MeshError(tag == BoundaryTag::gamma ? "Gamma is empty"
                                              : "Gamma0 is empty");
  QuadratureField f = QuadratureField::boundary(mesh, tag);
  const int nq = mesh.facet_quad_points();
  for (std::size_t i = 0; i < f.facets.size(); ++i)
    for (int k = 0; k < nq; ++k)
      f.values[i * nq + k] = u.at_facet_quad(f.facets[i], k);
  return f;
}

void write_csv(std::ostream& os, const FeFunction& u) {
  const Mesh& mesh = u.mesh();
  os << (mesh.dim() == 1 ? "node_index,x,value\n" : "node_index,x,y,value\n");
  char buf[128];
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Point& p = mesh.node(i);
    if (mesh.dim() == 1)
      std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", i, p.x, u[i]);
    else
      std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", i, p.x, p.y,
                    u[i]);
    os << buf;
  }
}

}  // namespace dpvi
