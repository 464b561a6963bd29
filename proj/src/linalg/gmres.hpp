// SPDX-License-Identifier: Apache-2.0

#ifndef DDPGD_LINALG_GMRES_HPP
#define DDPGD_LINALG_GMRES_HPP

#include <cstddef>
#include <functional>
#include <optional>
#include <span>

#include "linalg/vector_ops.hpp"

namespace ddpgd::linalg
{

struct GmresConfig
{
  double rel_tol = 1e-6;
  std::size_t max_iters = 1000;
  // Krylov dimension before restarting; unset means full GMRES.
  std::optional<std::size_t> restart;
};

enum class GmresStatus
{
  Converged,
  MaxIterations,
  Breakdown
};

const char *ToString(GmresStatus status);

struct GmresResult
{
  Vector x;
  std::size_t iterations = 0;
  // Relative residual estimate after each iteration.
  std::vector<double> residual_history;
  double final_relative_residual = 0.0;
  GmresStatus status = GmresStatus::Converged;

  bool converged() const { return status == GmresStatus::Converged; }
};

// y = A x for a matrix-free operator.
using LinearOperator = std::function<void(std::span<const double> x, std::span<double> y)>;

//
// GMRES with zero initial guess, modified Gram-Schmidt Arnoldi with one reorthogonalization
// pass and Givens rotations on the Hessenberg matrix.
//
GmresResult Gmres(const LinearOperator &apply, std::span<const double> b,
                  const GmresConfig &cfg = {});

}  // namespace ddpgd::linalg

#endif  // DDPGD_LINALG_GMRES_HPP
