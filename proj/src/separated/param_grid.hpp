// SPDX-License-Identifier: Apache-2.0

#ifndef DDPGD_SEPARATED_PARAM_GRID_HPP
#define DDPGD_SEPARATED_PARAM_GRID_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ddpgd::separated
{

// Uniform collocation points lower, lower + step, ..., upper on one parametric axis.
class ParamAxis
{
public:
  ParamAxis(std::string name, double lower, double upper, double step);

  const std::string &name() const { return name_; }
  double lower() const { return lower_; }
  double upper() const { return upper_; }
  double step() const { return step_; }
  std::size_t size() const { return points_.size(); }
  const std::vector<double> &points() const { return points_; }
  // Trapezoidal quadrature weights.
  const std::vector<double> &weights() const { return weights_; }

  bool Contains(double mu) const;

  // Interval index k and local coordinate t in [0, 1] such that
  // mu = (1 - t) * points[k] + t * points[k + 1]. Throws DomainError outside the axis.
  std::pair<std::size_t, double> Locate(double mu) const;

  bool operator==(const ParamAxis &other) const;

private:
  std::string name_;
  double lower_;
  double upper_;
  double step_;
  std::vector<double> points_;
  std::vector<double> weights_;
};

class ParamGrid
{
public:
  ParamGrid() = default;
  explicit ParamGrid(std::vector<ParamAxis> axes);

  std::size_t dims() const { return axes_.size(); }
  const ParamAxis &axis(std::size_t d) const { return axes_[d]; }
  const std::vector<ParamAxis> &axes() const { return axes_; }
  std::optional<std::size_t> Find(const std::string &name) const;
  std::vector<std::string> Names() const;

  // Parameter tuple in this grid's axis order picked from a named assignment.
  // Throws DomainError when a name is missing or a value lies outside its axis.
  std::vector<double> Select(const std::map<std::string, double> &mu) const;

  bool operator==(const ParamGrid &other) const { return axes_ == other.axes_; }

private:
  std::vector<ParamAxis> axes_;
};

}  // namespace ddpgd::separated

#endif  // DDPGD_SEPARATED_PARAM_GRID_HPP
