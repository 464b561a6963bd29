// SPDX-License-Identifier: Apache-2.0

#include "linalg/spd_solver.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <string>

#include "common/counters.hpp"
#include "common/error.hpp"

namespace ddpgd::linalg
{

struct SpdFactorization::Impl
{
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt;
};

SpdFactorization::SpdFactorization(const SparseMatrix &A) : n_(A.rows())
{
  if (A.rows() != A.cols())
  {
    throw ArgumentError("SpdFactorization: matrix is not square");
  }
  counters::CountFactorization();
  auto impl = std::make_shared<Impl>();
  if (n_ > 0)
  {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(A.nnz());
    for (std::size_t i = 0; i < A.rows(); ++i)
    {
      for (std::size_t k = A.row_offsets()[i]; k < A.row_offsets()[i + 1]; ++k)
      {
        trip.emplace_back(static_cast<int>(i), static_cast<int>(A.col_indices()[k]),
                          A.values()[k]);
      }
    }
    Eigen::SparseMatrix<double> m(static_cast<int>(n_), static_cast<int>(n_));
    m.setFromTriplets(trip.begin(), trip.end());
    impl->llt.compute(m);
    if (impl->llt.info() != Eigen::Success)
    {
      throw SolverError("sparse Cholesky failed: matrix is not symmetric positive definite (n=" +
                        std::to_string(n_) + ")");
    }
  }
  impl_ = std::move(impl);
}

Vector SpdFactorization::Solve(std::span<const double> b) const
{
  if (b.size() != n_)
  {
    throw ArgumentError("SpdFactorization::Solve: dimension mismatch");
  }
  if (n_ == 0)
  {
    return {};
  }
  Eigen::Map<const Eigen::VectorXd> rhs(b.data(), static_cast<Eigen::Index>(n_));
  Eigen::VectorXd x = impl_->llt.solve(rhs);
  return Vector(x.data(), x.data() + x.size());
}

Vector SpdSolve(const SparseMatrix &A, std::span<const double> b)
{
  return SpdFactorization(A).Solve(b);
}

Vector ConjugateGradient(const SparseMatrix &A, std::span<const double> b, const CgConfig &cfg)
{
  const std::size_t n = A.rows();
  if (A.cols() != n || b.size() != n)
  {
    throw ArgumentError("ConjugateGradient: dimension mismatch");
  }
  Vector x(n, 0.0);
  const double bnorm = Norm2(b);
  if (bnorm == 0.0)
  {
    return x;
  }
  Vector diag = A.Diagonal();
  for (double d : diag)
  {
    if (!(d > 0.0))
    {
      throw SolverError("ConjugateGradient: non-positive diagonal entry");
    }
  }
  Vector r(b.begin(), b.end()), z(n), p(n), Ap(n);
  for (std::size_t i = 0; i < n; ++i)
  {
    z[i] = r[i] / diag[i];
  }
  p = z;
  double rz = Dot(r, z);
  for (std::size_t it = 0; it < cfg.max_iters; ++it)
  {
    A.Multiply(p, Ap);
    const double pAp = Dot(p, Ap);
    if (!(pAp > 0.0))
    {
      throw SolverError("ConjugateGradient: matrix is not positive definite");
    }
    const double alpha = rz / pAp;
    Axpy(alpha, p, x);
    Axpy(-alpha, Ap, r);
    if (Norm2(r) <= cfg.rel_tol * bnorm)
    {
      return x;
    }
    for (std::size_t i = 0; i < n; ++i)
    {
      z[i] = r[i] / diag[i];
    }
    const double rz_new = Dot(r, z);
    if (rz_new == 0.0)
    {
      throw SolverError("ConjugateGradient: stagnation");
    }
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i)
    {
      p[i] = z[i] + beta * p[i];
    }
  }
  throw SolverError("ConjugateGradient: no convergence in " + std::to_string(cfg.max_iters) +
                    " iterations");
}

}  // namespace ddpgd::linalg
