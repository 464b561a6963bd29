// SPDX-License-Identifier: Apache-2.0

#ifndef DDPGD_DD_OFFLINE_HPP
#define DDPGD_DD_OFFLINE_HPP

#include <cstdint>
#include <vector>

#include "dd/decomposition.hpp"
#include "dd/problem.hpp"
#include "pgd/pgd_solver.hpp"
#include "separated/separated_tensor.hpp"

namespace ddpgd::dd
{

struct SubproblemStats
{
  // 0 is the source problem, q + 1 the trace problem of interface node q.
  std::size_t index = 0;
  std::size_t modes_before = 0;
  std::size_t modes_after = 0;
  double compression_error = 0.0;
  bool compression_stagnated = false;
  std::size_t unconverged_modes = 0;
  std::size_t fixed_point_iterations = 0;
  double seconds = 0.0;  // not persisted
};

struct SurrogateModel
{
  Subdomain subdomain;
  separated::ParamGrid grid;
  // Source problem: zero trace, all source and Neumann data.
  separated::SeparatedTensor u0;
  // Trace problems: nodal hat lift at interface node q (first mode) plus homogeneous part.
  std::vector<separated::SeparatedTensor> uq;

  double enrich_tol = 0.0;
  double compress_tol = 0.0;
  std::uint64_t seed = 0;
  std::vector<SubproblemStats> stats;
  double build_seconds = 0.0;  // not persisted

  // PGD modes summed over all subproblems, lifts excluded.
  std::size_t ModesBefore() const;
  std::size_t ModesAfter() const;
};

struct OfflineOptions
{
  pgd::PgdConfig pgd;
  double compress_tol = 1e-3;
  std::size_t workers = 1;
  std::uint64_t seed = 1;
};

// Parametric axes the data actually uses on this subdomain, in grid order. A subdomain whose
// data is parameter-free keeps the first axis so the model still has a grid.
separated::ParamGrid ActiveGrid(const Subdomain &sd, const separated::ParamGrid &grid,
                                const ProblemData &data);

// Solves the source problem and one trace problem per interface node, then compresses.
// Subproblem k uses the seed SubproblemSeed(opts.seed, sd.id, k) whatever the worker count.
// Throws SolverError naming the failing subproblem.
SurrogateModel BuildSurrogate(const Subdomain &sd, const separated::ParamGrid &grid,
                              const ProblemData &data, const OfflineOptions &opts);

// Checks the trace property of every uq and the zero trace of u0 at the given parameter
// tuples; returns the largest deviation.
double TraceDefect(const SurrogateModel &model, const std::vector<std::vector<double>> &mus);

}  // namespace ddpgd::dd

#endif  // DDPGD_DD_OFFLINE_HPP
