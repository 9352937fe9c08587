#include "dpvi/operator.hpp"

#include <stdexcept>
#include <vector>

namespace dpvi {

DoublePhaseOperator::DoublePhaseOperator(ExponentData ed, double eps,
                                         kernels::Exec exec)
    : ed_(std::move(ed)), eps_(eps), exec_(exec) {
  if (!ed_.mesh) throw std::invalid_argument("exponent data has no mesh");
  set_eps(eps);
}

void DoublePhaseOperator::set_eps(double eps) {
  if (!(eps >= 0.0)) throw std::invalid_argument("smoothing must be >= 0");
  eps_ = eps;
}

void DoublePhaseOperator::check(const FeFunction& u) const {
  if (u.mesh_ptr().get() != ed_.mesh.get())
    throw MeshError("function and operator live on different meshes");
}

DualVector DoublePhaseOperator::apply(const FeFunction& u) const {
  check(u);
  const Mesh& m = mesh();
  std::vector<double> local(m.num_elements() * kernels::kVec);
  kernels::element_flux(m, ed_, u.coeffs(), local, exec_);
  DualVector r = DualVector::Zero(static_cast<Eigen::Index>(m.num_nodes()));
  kernels::scatter_elements(m, local, r);
  return r;
}

double DoublePhaseOperator::energy(const FeFunction& u) const {
  check(u);
  const Mesh& m = mesh();
  std::vector<double> local(m.num_elements());
  kernels::element_energy(m, ed_, u.coeffs(), local, exec_);
  double total = 0.0;
  for (double v : local) total += v;
  return total;
}

SparseMatrix DoublePhaseOperator::jacobian(const FeFunction& u) const {
  return jacobian(u, eps_);
}

SparseMatrix DoublePhaseOperator::jacobian(const FeFunction& u,
                                           double eps) const {
  check(u);
  const Mesh& m = mesh();
  std::vector<double> local(m.num_elements() * kernels::kMat);
  kernels::element_jacobian(m, ed_, u.coeffs(), eps, local, exec_);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(m.num_elements() * kernels::kMat);
  kernels::scatter_element_matrices(m, local, triplets);
  const auto n = static_cast<Eigen::Index>(m.num_nodes());
  SparseMatrix j(n, n);
  j.setFromTriplets(triplets.begin(), triplets.end());
  return j;
}

double DoublePhaseOperator::monotonicity_gap(const FeFunction& u,
                                             const FeFunction& v) const {
  require_same_mesh(u, v);
  return (apply(u) - apply(v)).dot(u.coeffs() - v.coeffs());
}

}  // namespace dpvi
