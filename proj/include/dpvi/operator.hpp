#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "dpvi/kernels.hpp"
#include "dpvi/mesh.hpp"
#include "dpvi/spaces.hpp"

namespace dpvi {

/// <Au, phi_i> for every nodal basis function. Entries at Gamma0 nodes are
/// computed too; solvers only read the free ones.
using DualVector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Discrete double phase operator
///   <Au, v> = int (|Du|^{p-2} Du + mu |Du|^{q-2} Du) . Dv
/// with its convex potential I(u) = int |Du|^p / p + mu |Du|^q / q.
class DoublePhaseOperator {
 public:
  explicit DoublePhaseOperator(ExponentData ed, double eps = 1e-8,
                               kernels::Exec exec = kernels::Exec::parallel);

  const Mesh& mesh() const { return *ed_.mesh; }
  const MeshPtr& mesh_ptr() const { return ed_.mesh; }
  const ExponentData& exponents() const { return ed_; }
  /// Gradient smoothing used by jacobian() only.
  double eps() const { return eps_; }
  void set_eps(double eps);
  kernels::Exec exec() const { return exec_; }

  DualVector apply(const FeFunction& u) const;
  double energy(const FeFunction& u) const;
  SparseMatrix jacobian(const FeFunction& u) const;
  SparseMatrix jacobian(const FeFunction& u, double eps) const;

  /// <Au - Av, u - v>.
  double monotonicity_gap(const FeFunction& u, const FeFunction& v) const;

 private:
  void check(const FeFunction& u) const;

  ExponentData ed_;
  double eps_;
  kernels::Exec exec_;
};

}  // namespace dpvi
