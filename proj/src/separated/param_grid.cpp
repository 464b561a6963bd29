// SPDX-License-Identifier: Apache-2.0

#include "separated/param_grid.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "common/error.hpp"

namespace ddpgd::separated
{

ParamAxis::ParamAxis(std::string name, double lower, double upper, double step)
  : name_(std::move(name)), lower_(lower), upper_(upper), step_(step)
{
  if (!(upper_ > lower_) || !(step_ > 0.0))
  {
    throw ConfigError("parameter axis '" + name_ + "': need lower < upper and step > 0");
  }
  const double intervals = (upper_ - lower_) / step_;
  const auto n = static_cast<std::size_t>(std::llround(intervals));
  if (n < 1 || std::abs(intervals - static_cast<double>(n)) > 1e-6 * std::max(1.0, intervals))
  {
    std::ostringstream msg;
    msg << "parameter axis '" << name_ << "': step " << step_ << " does not divide ["
        << lower_ << ", " << upper_ << "]";
    throw ConfigError(msg.str());
  }
  points_.resize(n + 1);
  for (std::size_t k = 0; k <= n; ++k)
  {
    points_[k] = lower_ + static_cast<double>(k) * step_;
  }
  points_.back() = upper_;
  weights_.assign(n + 1, step_);
  weights_.front() = weights_.back() = 0.5 * step_;
}

bool ParamAxis::Contains(double mu) const
{
  const double slack = 1e-12 * (upper_ - lower_);
  return mu >= lower_ - slack && mu <= upper_ + slack;
}

std::pair<std::size_t, double> ParamAxis::Locate(double mu) const
{
  if (!std::isfinite(mu) || !Contains(mu))
  {
    std::ostringstream msg;
    msg << "parameter '" << name_ << "' = " << mu << " lies outside [" << lower_ << ", "
        << upper_ << "]";
    throw DomainError(msg.str());
  }
  const std::size_t last = points_.size() - 1;
  double t = (mu - lower_) / step_;
  const double nearest = std::round(t);
  if (std::abs(t - nearest) <= 1e-9)
  {
    t = nearest;
  }
  t = std::clamp(t, 0.0, static_cast<double>(last));
  auto k = static_cast<std::size_t>(std::floor(t));
  if (k >= last)
  {
    return {last - 1, 1.0};
  }
  return {k, t - static_cast<double>(k)};
}

bool ParamAxis::operator==(const ParamAxis &other) const
{
  return name_ == other.name_ && lower_ == other.lower_ && upper_ == other.upper_ &&
         step_ == other.step_ && points_.size() == other.points_.size();
}

ParamGrid::ParamGrid(std::vector<ParamAxis> axes) : axes_(std::move(axes))
{
  std::set<std::string> seen;
  for (const auto &a : axes_)
  {
    if (!seen.insert(a.name()).second)
    {
      throw ConfigError("duplicate parameter axis '" + a.name() + "'");
    }
  }
}

std::optional<std::size_t> ParamGrid::Find(const std::string &name) const
{
  for (std::size_t d = 0; d < axes_.size(); ++d)
  {
    if (axes_[d].name() == name)
    {
      return d;
    }
  }
  return std::nullopt;
}

std::vector<std::string> ParamGrid::Names() const
{
  std::vector<std::string> out;
  for (const auto &a : axes_)
  {
    out.push_back(a.name());
  }
  return out;
}

std::vector<double> ParamGrid::Select(const std::map<std::string, double> &mu) const
{
  std::vector<double> out;
  for (const auto &a : axes_)
  {
    auto it = mu.find(a.name());
    if (it == mu.end())
    {
      throw DomainError("no value given for parameter '" + a.name() + "'");
    }
    a.Locate(it->second);
    out.push_back(it->second);
  }
  return out;
}

}  // namespace ddpgd::separated
