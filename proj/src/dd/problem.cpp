// SPDX-License-Identifier: Apache-2.0

#include "dd/problem.hpp"

#include "common/error.hpp"

namespace ddpgd::dd
{

double DataTerm::FactorAt(const ParamValues &mu) const
{
  double v = 1.0;
  for (const auto &f : factors)
  {
    auto it = mu.find(f.axis);
    if (it == mu.end())
    {
      throw DomainError("no value given for parameter '" + f.axis + "'");
    }
    v *= f.eval(it->second);
  }
  return v;
}

std::vector<std::vector<double>> DataTerm::SampleFactors(const separated::ParamGrid &grid) const
{
  std::vector<std::vector<double>> out;
  for (const auto &axis : grid.axes())
  {
    std::vector<double> v(axis.size(), 1.0);
    for (const auto &f : factors)
    {
      if (f.axis == axis.name())
      {
        for (std::size_t j = 0; j < v.size(); ++j) v[j] *= f.eval(axis.points()[j]);
      }
    }
    out.push_back(std::move(v));
  }
  for (const auto &f : factors)
  {
    if (!grid.Find(f.axis))
    {
      throw ArgumentError("term depends on parameter '" + f.axis + "' which the grid lacks");
    }
  }
  return out;
}

namespace
{

fem::ScalarField SumAt(const std::vector<const DataTerm *> &terms, const ParamValues &mu,
                       const std::string &what)
{
  std::vector<std::pair<double, fem::ScalarField>> parts;
  for (const auto *t : terms)
  {
    parts.emplace_back(t->FactorAt(mu), t->spatial);
  }
  return {[parts](double x, double y)
          {
            double s = 0.0;
            for (const auto &[c, f] : parts) s += c * f(x, y);
            return s;
          },
          what};
}

std::vector<const DataTerm *> Pointers(const std::vector<DataTerm> &terms)
{
  std::vector<const DataTerm *> out;
  for (const auto &t : terms) out.push_back(&t);
  return out;
}

}  // namespace

fem::ScalarField ProblemData::DiffusionAt(const ParamValues &mu) const
{
  return SumAt(Pointers(diffusion), mu, "diffusion");
}

fem::ScalarField ProblemData::SourceAt(const ParamValues &mu) const
{
  return SumAt(Pointers(source), mu, "source");
}

fem::ScalarField ProblemData::NeumannAt(const std::string &side, const ParamValues &mu) const
{
  std::vector<const DataTerm *> sel;
  for (const auto &t : neumann)
  {
    if (t.side == side) sel.push_back(&t);
  }
  return SumAt(sel, mu, "neumann:" + side);
}

bool ProblemData::HasNeumann(const std::string &side) const
{
  for (const auto &t : neumann)
  {
    if (t.side == side) return true;
  }
  return false;
}

}  // namespace ddpgd::dd
