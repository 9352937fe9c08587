#pragma once

// Element kernels. Each kernel fills one block of local values per element
// (or per facet); the element loop runs either serially or under OpenMP.
// Scatter into global vectors/matrices is always serial in element order,
// so both paths produce bit-identical results.

#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "dpvi/mesh.hpp"
#include "dpvi/spaces.hpp"

namespace dpvi::kernels {

enum class Exec { serial, parallel };

/// Per-element block sizes.
inline constexpr int kVec = Mesh::kMaxVerts;
inline constexpr int kMat = Mesh::kMaxVerts * Mesh::kMaxVerts;

/// out[e*kVec + a] = int_e (|Du|^{p-2} + mu |Du|^{q-2}) Du . D phi_a.
void element_flux(const Mesh& mesh, const ExponentData& ed,
                  const Eigen::VectorXd& u, std::span<double> out, Exec exec);

/// out[e] = int_e |Du|^p / p + mu |Du|^q / q.
void element_energy(const Mesh& mesh, const ExponentData& ed,
                    const Eigen::VectorXd& u, std::span<double> out,
                    Exec exec);

/// Derivative of element_flux with the gradient norm smoothed as
/// sqrt(|Du|^2 + eps^2); out[e*kMat + a*kVec + b].
void element_jacobian(const Mesh& mesh, const ExponentData& ed,
                      const Eigen::VectorXd& u, double eps,
                      std::span<double> out, Exec exec);

/// out[e*kVec + a] = int_e c phi_a, c given per interior quadrature point.
void element_load(const Mesh& mesh, std::span<const double> c,
                  std::span<double> out, Exec exec);

/// out[e*kMat + a*kVec + b] = int_e c phi_a phi_b.
void element_mass(const Mesh& mesh, std::span<const double> c,
                  std::span<double> out, Exec exec);

/// Boundary analogues over an explicit facet list; c has one value per
/// facet quadrature point, facet by facet.
void facet_load(const Mesh& mesh, std::span<const std::size_t> facets,
                std::span<const double> c, std::span<double> out);
void facet_mass(const Mesh& mesh, std::span<const std::size_t> facets,
                std::span<const double> c, std::span<double> out);

// Serial scatter helpers.
void scatter_elements(const Mesh& mesh, std::span<const double> local,
                      Eigen::VectorXd& global);
void scatter_facets(const Mesh& mesh, std::span<const std::size_t> facets,
                    std::span<const double> local, Eigen::VectorXd& global);
void scatter_element_matrices(const Mesh& mesh, std::span<const double> local,
                              std::vector<Eigen::Triplet<double>>& triplets);
void scatter_facet_matrices(const Mesh& mesh,
                            std::span<const std::size_t> facets,
                            std::span<const double> local,
                            std::vector<Eigen::Triplet<double>>& triplets);

}  // namespace dpvi::kernels
