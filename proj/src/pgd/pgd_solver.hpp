// SPDX-License-Identifier: Apache-2.0

#ifndef DDPGD_PGD_PGD_SOLVER_HPP
#define DDPGD_PGD_PGD_SOLVER_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fem/mesh.hpp"
#include "linalg/sparse_matrix.hpp"
#include "separated/separated_tensor.hpp"

namespace ddpgd::pgd
{

using linalg::Vector;
using separated::ParamGrid;
using separated::SeparatedTensor;

// One separable data term: spatial factor times per-axis functions sampled on the grid.
// `factors` has one vector per grid axis.
struct FieldTerm
{
  fem::ScalarField spatial;
  std::vector<Vector> factors;
  std::string label;  // boundary label for Neumann terms
};

// Parametric elliptic problem in separated form on one mesh:
//   sum_k alpha_k(mu) K_k u = sum_l beta_l(mu) b_l,  u = lift on fixed nodes.
struct SeparatedProblem
{
  const fem::StructuredMesh *mesh = nullptr;
  ParamGrid grid;
  std::vector<FieldTerm> diffusion;
  std::vector<FieldTerm> source;
  std::vector<FieldTerm> neumann;
  // Rank-one Dirichlet lift (nodal vector, per-axis factors).
  std::optional<separated::Mode> lift;
  // Nodes where the homogeneous part vanishes (exterior Dirichlet and interface nodes).
  std::vector<std::size_t> fixed_zero_nodes;
};

// Same problem with every spatial factor assembled.
struct AssembledProblem
{
  ParamGrid grid;
  std::size_t n_space = 0;
  std::vector<std::size_t> fixed_nodes;
  std::vector<linalg::SparseMatrix> operators;
  std::vector<std::vector<Vector>> operator_factors;
  std::vector<Vector> loads;
  std::vector<std::vector<Vector>> load_factors;
  std::optional<separated::Mode> lift;
};

AssembledProblem Assemble(const SeparatedProblem &p);

struct PgdConfig
{
  double enrich_tol = 1e-4;
  std::size_t max_modes = 50;
  double fp_tol = 1e-3;
  std::size_t fp_max_iters = 25;
  std::uint64_t seed = 1;
};

struct PgdResult
{
  // Homogeneous part v; the full field is lift + v.
  SeparatedTensor homogeneous;
  std::vector<double> amplitudes;
  // Modes accepted without the fixed point reaching fp_tol.
  std::size_t unconverged_modes = 0;
  std::size_t fixed_point_iterations = 0;
};

// Greedy rank-one enrichment with alternating spatial / parametric updates.
// Spatial updates are FE solves, parametric updates are pointwise at each collocation point.
PgdResult Solve(const AssembledProblem &p, const PgdConfig &cfg);
PgdResult Solve(const SeparatedProblem &p, const PgdConfig &cfg);

// l2 norm of the spatial vector times the product of parametric max-norms.
double Amplitude(const separated::Mode &mode);

// Nodal lift equal to 1 at `node` and 0 elsewhere, with parametric factors identically 1.
separated::Mode HatLift(std::size_t n_space, std::size_t node, const ParamGrid &grid);

// Full field lift + v as a single tensor (the lift is the first mode when present).
SeparatedTensor WithLift(const SeparatedTensor &homogeneous,
                         const std::optional<separated::Mode> &lift);

}  // namespace ddpgd::pgd

#endif  // DDPGD_PGD_PGD_SOLVER_HPP
