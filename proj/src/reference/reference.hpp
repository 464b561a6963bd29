// SPDX-License-Identifier: Apache-2.0

#ifndef DDPGD_REFERENCE_REFERENCE_HPP
#define DDPGD_REFERENCE_REFERENCE_HPP

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "dd/decomposition.hpp"
#include "dd/problem.hpp"
#include "fem/assembly.hpp"
#include "linalg/spd_solver.hpp"
#include "linalg/vector_ops.hpp"

namespace ddpgd::reference
{

using linalg::Vector;

struct GlobalProblem
{
  dd::Geometry geometry;
  dd::ProblemData data;
  std::optional<dd::ExactSolution> exact;
};

// FEM system of one mesh at fixed mu, factorized once. Exterior Dirichlet sides are zero; the
// trace nodes take the values passed to Solve.
class LocalSolver
{
public:
  LocalSolver(const fem::StructuredMesh &mesh, const dd::ProblemData &data, const dd::ParamValues &mu,
              std::vector<std::size_t> trace_nodes = {});

  Vector Solve(std::span<const double> trace_values = {}) const;

private:
  std::size_t n_dirichlet_ = 0;
  std::size_t n_trace_ = 0;
  fem::ReducedSystem rs_;
  linalg::Vector b_free_;
  std::optional<linalg::SpdFactorization> llt_;
};

// Nodal FEM solution on a mesh with the data frozen at mu. Interface-tagged sides take
// `interface_values` (one value per node of InterfaceNodes order), other Dirichlet sides zero.
Vector SolveLocal(const fem::StructuredMesh &mesh, const dd::ProblemData &data,
                  const dd::ParamValues &mu, std::span<const std::size_t> trace_nodes = {},
                  std::span<const double> trace_values = {});

// Monolithic solve on GlobalMesh(gp.geometry).
Vector FullOrderSolve(const GlobalProblem &gp, const dd::ParamValues &mu);

struct SchwarzResult
{
  std::vector<Vector> fields;
  // Trace of each subdomain in Subdomain::InterfaceNodes order, as used by the last solve.
  std::vector<Vector> traces;
  std::size_t iterations = 0;
  bool converged = false;
  // Max-norm interface mismatch after each sweep.
  std::vector<double> history;
};

// Multiplicative (Gauss-Seidel) alternating Schwarz with direct local solves. Each sweep solves
// the subdomains in order, taking traces from the latest neighbour fields. Stops when the
// largest |u_i - u_j| over interface nodes drops below tol.
SchwarzResult AlternatingSchwarz(const std::vector<dd::Subdomain> &subdomains,
                                 const dd::ProblemData &data, const dd::ParamValues &mu, double tol,
                                 std::size_t max_iters,
                                 const std::vector<Vector> *initial_traces = nullptr);

// ||u_h - u|| / ||u|| in L2 using 4x4 Gauss points per element; u_h is the Q1 interpolant.
// The absolute error when u vanishes.
double RelL2Error(const fem::StructuredMesh &mesh, std::span<const double> field,
                  const std::function<double(double, double)> &exact);

// max |a - b| / max |b| over all entries; max |a - b| when b vanishes.
double RelLinfError(std::span<const double> a, std::span<const double> b);

// Values of a global nodal field at the nodes of a subdomain mesh lying on the same lattice.
Vector RestrictToMesh(const fem::StructuredMesh &global, std::span<const double> field,
                      const fem::StructuredMesh &local);

}  // namespace ddpgd::reference

#endif  // DDPGD_REFERENCE_REFERENCE_HPP
