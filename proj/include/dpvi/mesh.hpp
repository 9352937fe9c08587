#pragma once

// Structured P1 meshes on (0,1) and (0,1)^2 with fixed Gauss quadrature,
// boundary partition into Gamma (natural) and Gamma0 (homogeneous
// Dirichlet) facets, and nodal lattice operations.

#include <array>
#include <cstddef>
#include <memory>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "dpvi/expr.hpp"

namespace dpvi {

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

enum class BoundaryTag { gamma, gamma0 };

struct MeshSpec {
  int dim = 1;
  int subdivisions = 1;
  /// Facets whose midpoint gives a positive value are tagged gamma.
  /// Empty means "0", i.e. everything is Gamma0.
  Expr gamma_predicate;
};

/// Immutable mesh. Element data (measures, basis gradients, quadrature
/// points) is precomputed once.
class Mesh {
 public:
  static constexpr int kMaxVerts = 3;

  explicit Mesh(const MeshSpec& spec);

  int dim() const { return dim_; }
  int subdivisions() const { return n_; }
  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_elements() const { return measure_.size(); }
  int verts_per_element() const { return dim_ + 1; }
  const Point& node(std::size_t i) const { return nodes_[i]; }
  std::span<const int> element(std::size_t e) const {
    return {elements_.data() + e * verts_per_element(),
            static_cast<std::size_t>(verts_per_element())};
  }
  double measure(std::size_t e) const { return measure_[e]; }
  /// Gradient of local basis function a on element e, component d.
  double basis_grad(std::size_t e, int a, int d) const {
    return grads_[(e * kMaxVerts + a) * 2 + d];
  }

  // Interior quadrature: same reference rule on every element.
  int quad_points_per_element() const { return static_cast<int>(qw_.size()); }
  std::size_t num_quad_points() const {
    return num_elements() * qw_.size();
  }
  /// Reference weight (sums to one); physical weight is weight*measure.
  double quad_weight(int k) const { return qw_[k]; }
  /// Barycentric value of local basis a at quadrature point k.
  double quad_basis(int k, int a) const { return qphi_[k * kMaxVerts + a]; }
  Point quad_point(std::size_t e, int k) const {
    return qpts_[e * qw_.size() + k];
  }

  // Boundary facets. In 1D a facet is a single node with unit weight.
  std::size_t num_facets() const { return facet_tags_.size(); }
  int verts_per_facet() const { return dim_; }
  std::span<const int> facet(std::size_t f) const {
    return {facets_.data() + f * verts_per_facet(),
            static_cast<std::size_t>(verts_per_facet())};
  }
  BoundaryTag facet_tag(std::size_t f) const { return facet_tags_[f]; }
  double facet_measure(std::size_t f) const { return facet_measure_[f]; }
  /// Facet indices carrying `tag`, in increasing order.
  const std::vector<std::size_t>& facets_with(BoundaryTag tag) const {
    return tag == BoundaryTag::gamma ? gamma_facets_ : gamma0_facets_;
  }
  int facet_quad_points() const { return static_cast<int>(fw_.size()); }
  double facet_quad_weight(int k) const { return fw_[k]; }
  double facet_quad_basis(int k, int a) const { return fphi_[k * 2 + a]; }
  Point facet_quad_point(std::size_t f, int k) const;

  /// True for nodes lying on a Gamma0 facet (coefficient fixed to zero).
  const std::vector<char>& dirichlet_mask() const { return dirichlet_; }
  bool is_dirichlet(std::size_t i) const { return dirichlet_[i] != 0; }
  std::size_t num_free_nodes() const;

 private:
  int dim_;
  int n_;
  std::vector<Point> nodes_;
  std::vector<int> elements_;
  std::vector<double> measure_;
  std::vector<double> grads_;
  std::vector<double> qw_;
  std::vector<double> qphi_;
  std::vector<Point> qpts_;
  std::vector<int> facets_;
  std::vector<BoundaryTag> facet_tags_;
  std::vector<double> facet_measure_;
  std::vector<std::size_t> gamma_facets_;
  std::vector<std::size_t> gamma0_facets_;
  std::vector<double> fw_;
  std::vector<double> fphi_;
  std::vector<char> dirichlet_;
};

using MeshPtr = std::shared_ptr<const Mesh>;

MeshPtr build_mesh(const MeshSpec& spec);

/// Continuous piecewise-linear function: one coefficient per node.
class FeFunction {
 public:
  FeFunction() = default;
  explicit FeFunction(MeshPtr mesh);
  FeFunction(MeshPtr mesh, Eigen::VectorXd coeffs);

  const MeshPtr& mesh_ptr() const { return mesh_; }
  const Mesh& mesh() const { return *mesh_; }
  std::size_t size() const { return static_cast<std::size_t>(c_.size()); }
  const Eigen::VectorXd& coeffs() const { return c_; }
  Eigen::VectorXd& coeffs() { return c_; }
  double operator[](std::size_t i) const { return c_[static_cast<Eigen::Index>(i)]; }
  double& operator[](std::size_t i) { return c_[static_cast<Eigen::Index>(i)]; }

  /// Value at interior quadrature point k of element e.
  double at_quad(std::size_t e, int k) const;
  /// Value at boundary quadrature point k of facet f.
  double at_facet_quad(std::size_t f, int k) const;
  /// Constant gradient on element e.
  std::array<double, 2> gradient(std::size_t e) const;

  /// True when every Gamma0 coefficient is exactly zero.
  bool in_dirichlet_subspace() const;

 private:
  MeshPtr mesh_;
  Eigen::VectorXd c_;
};

enum class FieldLocation { interior, boundary };

/// One value per quadrature point. Interior fields are laid out element by
/// element; boundary fields cover the listed facets, facet by facet.
struct QuadratureField {
  FieldLocation location = FieldLocation::interior;
  std::vector<std::size_t> facets;  // boundary fields only
  std::vector<double> values;

  static QuadratureField interior(const Mesh& mesh, double fill = 0.0);
  static QuadratureField boundary(const Mesh& mesh, BoundaryTag tag,
                                  double fill = 0.0);
  bool matches(const Mesh& mesh) const;
};

/// Samples an expression in x (and y) at every interior quadrature point.
QuadratureField sample_interior(const Expr& expr, const Mesh& mesh);

FeFunction fe_interpolate(const Expr& expr, const MeshPtr& mesh);
FeFunction fe_constant(const MeshPtr& mesh, double value);

enum class LatticeKind { meet, join };

FeFunction lattice_op(const FeFunction& u, const FeFunction& v,
                      LatticeKind kind);
inline FeFunction meet(const FeFunction& u, const FeFunction& v) {
  return lattice_op(u, v, LatticeKind::meet);
}
inline FeFunction join(const FeFunction& u, const FeFunction& v) {
  return lattice_op(u, v, LatticeKind::join);
}

/// Values of u at the boundary quadrature points of `tag` facets.
QuadratureField trace(const FeFunction& u, BoundaryTag tag);

/// CSV with header "node_index,x[,y],value".
void write_csv(std::ostream& os, const FeFunction& u);

void require_same_mesh(const FeFunction& u, const FeFunction& v);

}  // namespace dpvi
