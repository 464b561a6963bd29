// SPDX-License-Identifier: Apache-2.0

#ifndef DDPGD_LINALG_SPARSE_MATRIX_HPP
#define DDPGD_LINALG_SPARSE_MATRIX_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "linalg/vector_ops.hpp"

namespace ddpgd::linalg
{

struct Triplet
{
  std::size_t row;
  std::size_t col;
  double value;
};

//
// Compressed sparse row storage. Column indices are sorted and unique within each row.
// Structural entries are kept even when their value is zero, so matrices assembled on the
// same mesh share a sparsity pattern.
//
class SparseMatrix
{
public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t n_rows, std::size_t n_cols, std::vector<std::size_t> row_offsets,
               std::vector<std::size_t> col_indices, std::vector<double> values);

  // Duplicate (row, col) entries are summed.
  static SparseMatrix FromTriplets(std::size_t n_rows, std::size_t n_cols,
                                   std::span<const Triplet> triplets);
  static SparseMatrix Identity(std::size_t n);

  std::size_t rows() const { return n_rows_; }
  std::size_t cols() const { return n_cols_; }
  std::size_t nnz() const { return values_.size(); }
  const std::vector<std::size_t> &row_offsets() const { return row_offsets_; }
  const std::vector<std::size_t> &col_indices() const { return col_indices_; }
  const std::vector<double> &values() const { return values_; }

  // Entry (i, j), zero when not stored.
  double At(std::size_t i, std::size_t j) const;

  // y = A x
  void Multiply(std::span<const double> x, std::span<double> y) const;
  Vector operator*(std::span<const double> x) const;

  // A(rows, cols) with the given (sorted or unsorted) index lists.
  SparseMatrix Extract(std::span<const std::size_t> row_ids,
                       std::span<const std::size_t> col_ids) const;

  bool IsSymmetric(double rel_tol = 1e-14) const;
  bool IsZero() const;
  bool SamePattern(const SparseMatrix &other) const;

  // Diagonal entries (zero where absent).
  Vector Diagonal() const;

private:
  std::size_t n_rows_ = 0;
  std::size_t n_cols_ = 0;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<std::size_t> col_indices_;
  std::vector<double> values_;
};

// sum_k coeffs[k] * mats[k]; all matrices must have equal dimensions.
SparseMatrix LinearCombination(std::span<const double> coeffs,
                               std::span<const SparseMatrix *const> mats);

}  // namespace ddpgd::linalg

#endif  // DDPGD_LINALG_SPARSE_MATRIX_HPP
