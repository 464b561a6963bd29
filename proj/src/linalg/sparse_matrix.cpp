// SPDX-License-Identifier: Apache-2.0

#include "linalg/sparse_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "common/error.hpp"

namespace ddpgd::linalg
{

SparseMatrix::SparseMatrix(std::size_t n_rows, std::size_t n_cols,
                           std::vector<std::size_t> row_offsets,
                           std::vector<std::size_t> col_indices, std::vector<double> values)
  : n_rows_(n_rows), n_cols_(n_cols), row_offsets_(std::move(row_offsets)),
    col_indices_(std::move(col_indices)), values_(std::move(values))
{
  if (row_offsets_.size() != n_rows_ + 1 || row_offsets_.front() != 0 ||
      row_offsets_.back() != col_indices_.size() || col_indices_.size() != values_.size())
  {
    throw ArgumentError("SparseMatrix: inconsistent CSR arrays");
  }
  for (std::size_t i = 0; i < n_rows_; ++i)
  {
    if (row_offsets_[i] > row_offsets_[i + 1])
    {
      throw ArgumentError("SparseMatrix: row offsets must be non-decreasing");
    }
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k)
    {
      if (col_indices_[k] >= n_cols_)
      {
        throw ArgumentError("SparseMatrix: column index out of range");
      }
      if (k > row_offsets_[i] && col_indices_[k] <= col_indices_[k - 1])
      {
        throw ArgumentError("SparseMatrix: column indices must be sorted and unique per row");
      }
    }
  }
}

SparseMatrix SparseMatrix::FromTriplets(std::size_t n_rows, std::size_t n_cols,
                                        std::span<const Triplet> triplets)
{
  std::vector<std::size_t> counts(n_rows + 1, 0);
  for (const auto &t : triplets)
  {
    if (t.row >= n_rows || t.col >= n_cols)
    {
      throw ArgumentError("SparseMatrix::FromTriplets: index out of range");
    }
    ++counts[t.row + 1];
  }
  std::partial_sum(counts.begin(), counts.end(), counts.begin());

  // Bucket by row, then sort and merge duplicates within each row.
  std::vector<std::pair<std::size_t, double>> bucket(triplets.size());
  std::vector<std::size_t> fill(counts.begin(), counts.end() - 1);
  for (const auto &t : triplets)
  {
    bucket[fill[t.row]++] = {t.col, t.value};
  }

  std::vector<std::size_t> offsets(n_rows + 1, 0);
  std::vector<std::size_t> cols;
  std::vector<double> vals;
  cols.reserve(triplets.size());
  vals.reserve(triplets.size());
  for (std::size_t i = 0; i < n_rows; ++i)
  {
    auto first = bucket.begin() + static_cast<std::ptrdiff_t>(counts[i]);
    auto last = bucket.begin() + static_cast<std::ptrdiff_t>(counts[i + 1]);
    std::stable_sort(first, last, [](const auto &a, const auto &b) { return a.first < b.first; });
    for (auto it = first; it != last; ++it)
    {
      if (!cols.empty() && cols.size() > offsets[i] && cols.back() == it->first)
      {
        vals.back() += it->second;
      }
      else
      {
        cols.push_back(it->first);
        vals.push_back(it->second);
      }
    }
    offsets[i + 1] = cols.size();
  }
  return SparseMatrix(n_rows, n_cols, std::move(offsets), std::move(cols), std::move(vals));
}

SparseMatrix SparseMatrix::Identity(std::size_t n)
{
  std::vector<std::size_t> offsets(n + 1);
  std::vector<std::size_t> cols(n);
  std::iota(offsets.begin(), offsets.end(), std::size_t{0});
  std::iota(cols.begin(), cols.end(), std::size_t{0});
  return SparseMatrix(n, n, std::move(offsets), std::move(cols), std::vector<double>(n, 1.0));
}

double SparseMatrix::At(std::size_t i, std::size_t j) const
{
  auto first = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i]);
  auto last = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i + 1]);
  auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j)
  {
    return 0.0;
  }
  return values_[static_cast<std::size_t>(it - col_indices_.begin())];
}

void SparseMatrix::Multiply(std::span<const double> x, std::span<double> y) const
{
  if (x.size() != n_cols_ || y.size() != n_rows_)
  {
    throw ArgumentError("SparseMatrix::Multiply: dimension mismatch");
  }
  for (std::size_t i = 0; i < n_rows_; ++i)
  {
    double s = 0.0;
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k)
    {
      s += values_[k] * x[col_indices_[k]];
    }
    y[i] = s;
  }
}

Vector SparseMatrix::operator*(std::span<const double> x) const
{
  Vector y(n_rows_);
  Multiply(x, y);
  return y;
}

SparseMatrix SparseMatrix::Extract(std::span<const std::size_t> row_ids,
                                   std::span<const std::size_t> col_ids) const
{
  constexpr std::size_t absent = static_cast<std::size_t>(-1);
  std::vector<std::size_t> col_map(n_cols_, absent);
  for (std::size_t k = 0; k < col_ids.size(); ++k)
  {
    col_map[col_ids[k]] = k;
  }
  std::vector<Triplet> trip;
  for (std::size_t r = 0; r < row_ids.size(); ++r)
  {
    const std::size_t i = row_ids[r];
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k)
    {
      if (col_map[col_indices_[k]] != absent)
      {
        trip.push_back({r, col_map[col_indices_[k]], values_[k]});
      }
    }
  }
  return FromTriplets(row_ids.size(), col_ids.size(), trip);
}

bool SparseMatrix::IsSymmetric(double rel_tol) const
{
  if (n_rows_ != n_cols_)
  {
    return false;
  }
  double scale = 0.0;
  for (double v : values_)
  {
    scale = std::max(scale, std::abs(v));
  }
  for (std::size_t i = 0; i < n_rows_; ++i)
  {
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k)
    {
      if (std::abs(values_[k] - At(col_indices_[k], i)) > rel_tol * scale)
      {
        return false;
      }
    }
  }
  return true;
}

bool SparseMatrix::IsZero() const
{
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

bool SparseMatrix::SamePattern(const SparseMatrix &other) const
{
  return n_rows_ == other.n_rows_ && n_cols_ == other.n_cols_ &&
         row_offsets_ == other.row_offsets_ && col_indices_ == other.col_indices_;
}

Vector SparseMatrix::Diagonal() const
{
  Vector d(std::min(n_rows_, n_cols_), 0.0);
  for (std::size_t i = 0; i < d.size(); ++i)
  {
    d[i] = At(i, i);
  }
  return d;
}

SparseMatrix LinearCombination(std::span<const double> coeffs,
                               std::span<const SparseMatrix *const> mats)
{
  if (coeffs.size() != mats.size() || mats.empty())
  {
    throw ArgumentError("LinearCombination: need one coefficient per matrix");
  }
  const SparseMatrix &first = *mats[0];
  bool shared = true;
  for (const auto *m : mats)
  {
    if (m->rows() != first.rows() || m->cols() != first.cols())
    {
      throw ArgumentError("LinearCombination: dimension mismatch");
    }
    shared = shared && m->SamePattern(first);
  }
  if (shared)
  {
    std::vector<double> vals(first.nnz(), 0.0);
    for (std::size_t k = 0; k < mats.size(); ++k)
    {
      Axpy(coeffs[k], mats[k]->values(), vals);
    }
    return SparseMatrix(first.rows(), first.cols(), first.row_offsets(), first.col_indices(),
                        std::move(vals));
  }
  std::vector<Triplet> trip;
  for (std::size_t k = 0; k < mats.size(); ++k)
  {
    const auto &m = *mats[k];
    for (std::size_t i = 0; i < m.rows(); ++i)
    {
      for (std::size_t p = m.row_offsets()[i]; p < m.row_offsets()[i + 1]; ++p)
      {
        trip.push_back({i, m.col_indices()[p], coeffs[k] * m.values()[p]});
      }
    }
  }
  return SparseMatrix::FromTriplets(first.rows(), first.cols(), trip);
}

}  // namespace ddpgd::linalg
