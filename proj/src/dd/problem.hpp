// SPDX-License-Identifier: Apache-2.0

#ifndef DDPGD_DD_PROBLEM_HPP
#define DDPGD_DD_PROBLEM_HPP

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fem/mesh.hpp"
#include "separated/param_grid.hpp"

namespace ddpgd::dd
{

using ParamValues = std::map<std::string, double>;

struct ParametricFactor
{
  std::string axis;
  std::function<double(double)> eval;
  std::string description;
};

// spatial(x, y) * prod_f factor_f(mu[axis_f])
struct DataTerm
{
  fem::ScalarField spatial;
  std::vector<ParametricFactor> factors;
  std::string side;  // boundary label, Neumann terms only

  double FactorAt(const ParamValues &mu) const;
  // Factor sampled on each axis of `grid`; axes the term does not mention give ones.
  std::vector<std::vector<double>> SampleFactors(const separated::ParamGrid &grid) const;
};

// Diffusion, volume source and Neumann flux, each a sum of separable terms.
struct ProblemData
{
  std::vector<DataTerm> diffusion;
  std::vector<DataTerm> source;
  std::vector<DataTerm> neumann;

  // Closures at a fixed parameter value.
  fem::ScalarField DiffusionAt(const ParamValues &mu) const;
  fem::ScalarField SourceAt(const ParamValues &mu) const;
  fem::ScalarField NeumannAt(const std::string &side, const ParamValues &mu) const;
  bool HasNeumann(const std::string &side) const;
};

struct Rectangle
{
  std::string id;
  fem::Point lower;
  fem::Point upper;
};

enum class ExteriorKind
{
  Dirichlet,
  Neumann
};

struct Geometry
{
  Rectangle domain;
  double h = 0.0;
  std::vector<Rectangle> subdomains;
  std::array<ExteriorKind, 4> exterior{ExteriorKind::Dirichlet, ExteriorKind::Dirichlet,
                                       ExteriorKind::Dirichlet, ExteriorKind::Dirichlet};

  ExteriorKind exterior_kind(fem::Side s) const { return exterior[static_cast<int>(s)]; }
};

using ExactSolution = std::function<double(double, double, const ParamValues &)>;

}  // namespace ddpgd::dd

#endif  // DDPGD_DD_PROBLEM_HPP
