// SPDX-License-Identifier: Apache-2.0

#ifndef DDPGD_SEPARATED_SEPARATED_TENSOR_HPP
#define DDPGD_SEPARATED_SEPARATED_TENSOR_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "linalg/vector_ops.hpp"
#include "separated/param_grid.hpp"

namespace ddpgd::separated
{

using linalg::Vector;

// One rank-one term: a nodal vector times one discrete function per parametric axis.
struct Mode
{
  Vector spatial;
  std::vector<Vector> parametric;
};

//
// Separated (canonical) representation  sum_m spatial_m(x) prod_d parametric_m^d(mu_d)
// of a parametric nodal field. Zero modes encode the zero field.
//
class SeparatedTensor
{
public:
  SeparatedTensor() = default;
  SeparatedTensor(std::size_t n_space, ParamGrid grid);

  std::size_t n_space() const { return n_space_; }
  const ParamGrid &grid() const { return grid_; }
  std::size_t num_modes() const { return modes_.size(); }
  const std::vector<Mode> &modes() const { return modes_; }
  const Mode &mode(std::size_t m) const { return modes_[m]; }

  // Throws ArgumentError when the mode's sizes do not match the tensor.
  void AddMode(Mode mode);

  // Field at a parameter tuple (grid axis order); per-axis piecewise-linear interpolation,
  // exact at collocation points. Throws DomainError outside the grid box.
  Vector Evaluate(std::span<const double> mu) const;

  // Field at a collocation point given by one index per axis.
  Vector EvaluateAtIndex(std::span<const std::size_t> index) const;

private:
  std::size_t n_space_ = 0;
  ParamGrid grid_;
  std::vector<Mode> modes_;
};

// Diagonal spatial weights for inner products; empty means plain Euclidean l2.
struct SpatialNorm
{
  Vector weights;

  double Dot(std::span<const double> a, std::span<const double> b) const;
};

// <a, b> in l2(space, weighted) x L2(grid, trapezoidal); computed from mode Gram products.
double Inner(const SeparatedTensor &a, const SeparatedTensor &b, const SpatialNorm &norm = {});
double Norm(const SeparatedTensor &t, const SpatialNorm &norm = {});

// Mode concatenation; grids and spatial sizes must match.
SeparatedTensor Add(const SeparatedTensor &a, const SeparatedTensor &b);
SeparatedTensor Scale(const SeparatedTensor &t, double c);

// Rescale each parametric vector so its largest-magnitude entry is +1, moving the
// amplitude into the spatial vector. A zero parametric vector zeroes the whole mode.
void NormalizeMode(Mode &mode);

struct CompressOptions
{
  std::size_t als_max_iters = 200;
  double als_tol = 1e-8;
  std::uint64_t seed = 0x5eed;
  // Joint ALS sweeps over all fitted modes after each greedy step; a sweep gaining less than
  // update_tol in squared residual ends the update.
  std::size_t update_sweeps = 10;
  double update_tol = 1e-3;
  // Also require ||t(mu_j) - t'(mu_j)|| <= tol ||t(mu_j)|| at every grid point. Skipped when
  // points * rank exceeds pointwise_max_entries.
  bool pointwise = true;
  std::size_t pointwise_max_entries = std::size_t{1} << 24;
};

struct CompressResult
{
  SeparatedTensor tensor;
  double relative_error = 0.0;
  double max_pointwise_error = 0.0;
  bool pointwise_checked = false;
  // Some rank-one fit hit als_max_iters.
  bool stagnated = false;
  // The greedy pass could not beat the input rank and the input was returned unchanged.
  bool kept_input = false;
};

// Greedy rank-one alternating least squares re-approximation of t, each step followed by a
// joint update of all fitted modes, with relative error
// ||t - t'|| <= tol ||t||, and the same bound pointwise on the grid when enabled.
CompressResult Compress(const SeparatedTensor &t, double tol, const SpatialNorm &norm = {},
                        const CompressOptions &opts = {});

}  // namespace ddpgd::separated

#endif  // DDPGD_SEPARATED_SEPARATED_TENSOR_HPP
