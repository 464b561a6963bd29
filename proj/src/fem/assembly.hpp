// SPDX-License-Identifier: Apache-2.0

#ifndef DDPGD_FEM_ASSEMBLY_HPP
#define DDPGD_FEM_ASSEMBLY_HPP

#include <span>
#include <string>
#include <vector>

#include "fem/mesh.hpp"
#include "linalg/sparse_matrix.hpp"

namespace ddpgd::fem
{

// Q1 bilinear finite elements with 2x2 Gauss quadrature per element. No boundary conditions
// are applied here.

// K_pq = int a grad(phi_p) . grad(phi_q)
linalg::SparseMatrix AssembleStiffness(const StructuredMesh &mesh, const ScalarField &a);

// b_p = int f phi_p
linalg::Vector AssembleLoad(const StructuredMesh &mesh, const ScalarField &f);

// b_p = int_{edges labelled `label`} g phi_p, 2-point Gauss rule per edge.
// Throws ConfigError when no boundary edge carries the label.
linalg::Vector AssembleNeumann(const StructuredMesh &mesh, const ScalarField &g,
                               const std::string &label);

// Nodes on interface-tagged edges (all of them, or only those with `label` when given),
// excluding nodes shared with an exterior Dirichlet edge. Sorted lexicographically by (x, y).
std::vector<std::size_t> InterfaceNodes(const StructuredMesh &mesh, const std::string &label = {});

// Reduced system over the free nodes after prescribing values on fixed nodes.
struct ReducedSystem
{
  std::vector<std::size_t> free_nodes;
  std::vector<std::size_t> fixed_nodes;
  linalg::SparseMatrix A_free;      // free x free
  linalg::SparseMatrix A_coupling;  // free x fixed
  linalg::Vector rhs;               // b_free - A_coupling * fixed_values

  // Full-length nodal vector from free values and the fixed values.
  linalg::Vector Expand(std::span<const double> free_values,
                        std::span<const double> fixed_values) const;
};

ReducedSystem EliminateDirichlet(const linalg::SparseMatrix &A, std::span<const double> b,
                                 std::span<const std::size_t> fixed_nodes,
                                 std::span<const double> fixed_values);

// Complement of `fixed` in [0, n), ascending.
std::vector<std::size_t> FreeNodes(std::size_t n, std::span<const std::size_t> fixed);

}  // namespace ddpgd::fem

#endif  // DDPGD_FEM_ASSEMBLY_HPP
