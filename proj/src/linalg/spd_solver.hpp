// SPDX-License-Identifier: Apache-2.0

#ifndef DDPGD_LINALG_SPD_SOLVER_HPP
#define DDPGD_LINALG_SPD_SOLVER_HPP

#include <memory>
#include <span>

#include "linalg/sparse_matrix.hpp"

namespace ddpgd::linalg
{

//
// Sparse Cholesky factorization of a symmetric positive definite matrix. The factor is
// immutable once built and may be shared between threads for concurrent solves.
//
class SpdFactorization
{
public:
  // Throws SolverError when a non-positive pivot is met.
  explicit SpdFactorization(const SparseMatrix &A);

  std::size_t size() const { return n_; }
  Vector Solve(std::span<const double> b) const;

private:
  struct Impl;
  std::size_t n_ = 0;
  std::shared_ptr<const Impl> impl_;
};

struct CgConfig
{
  double rel_tol = 1e-12;
  std::size_t max_iters = 10000;
};

// Direct solve (factor + solve).
Vector SpdSolve(const SparseMatrix &A, std::span<const double> b);

// Jacobi-preconditioned conjugate gradients. Throws SolverError on stagnation or when
// max_iters is exhausted.
Vector ConjugateGradient(const SparseMatrix &A, std::span<const double> b,
                         const CgConfig &cfg = {});

}  // namespace ddpgd::linalg

#endif  // DDPGD_LINALG_SPD_SOLVER_HPP
