// SPDX-License-Identifier: Apache-2.0

#include "fem/mesh.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"

namespace ddpgd::fem
{

const char *ToString(Side side)
{
  switch (side)
  {
    case Side::Left:
      return "left";
    case Side::Right:
      return "right";
    case Side::Bottom:
      return "bottom";
    case Side::Top:
      return "top";
  }
  return "?";
}

Side SideFromString(const std::string &name)
{
  for (Side s : kAllSides)
  {
    if (name == ToString(s))
    {
      return s;
    }
  }
  throw ConfigError("unknown side '" + name + "' (expected left, right, bottom or top)");
}

const char *ToString(BoundaryTag tag)
{
  switch (tag)
  {
    case BoundaryTag::ExteriorDirichlet:
      return "exterior_dirichlet";
    case BoundaryTag::ExteriorNeumann:
      return "exterior_neumann";
    case BoundaryTag::Interface:
      return "interface";
  }
  return "?";
}

StructuredMesh::StructuredMesh(Point origin, Point extent, std::size_t nx, std::size_t ny,
                               std::array<SideSpec, 4> sides)
  : origin_(origin), extent_(extent), nx_(nx), ny_(ny), sides_(std::move(sides))
{
  if (nx_ == 0 || ny_ == 0 || !(extent_.x > 0.0) || !(extent_.y > 0.0))
  {
    throw ArgumentError("StructuredMesh: need positive extent and element counts");
  }
  for (Side s : kAllSides)
  {
    auto &spec = sides_[static_cast<int>(s)];
    if (spec.label.empty() && spec.tag != BoundaryTag::Interface)
    {
      spec.label = ToString(s);
    }
  }
  coords_.reserve(num_nodes());
  for (std::size_t j = 0; j <= ny_; ++j)
  {
    for (std::size_t i = 0; i <= nx_; ++i)
    {
      coords_.push_back({origin_.x + static_cast<double>(i) * hx(),
                         origin_.y + static_cast<double>(j) * hy()});
    }
  }
  for (Side s : kAllSides)
  {
    const auto nodes = side_nodes(s);
    const auto &spec = sides_[static_cast<int>(s)];
    for (std::size_t k = 0; k + 1 < nodes.size(); ++k)
    {
      edges_.push_back({s, nodes[k], nodes[k + 1], spec.tag, spec.label});
    }
  }
}

Point StructuredMesh::node(std::size_t n) const
{
  return coords_[n];
}

std::array<std::size_t, 4> StructuredMesh::element(std::size_t e) const
{
  const std::size_t i = e % nx_;
  const std::size_t j = e / nx_;
  return {node_index(i, j), node_index(i + 1, j), node_index(i + 1, j + 1), node_index(i, j + 1)};
}

std::vector<std::size_t> StructuredMesh::side_nodes(Side s) const
{
  std::vector<std::size_t> out;
  switch (s)
  {
    case Side::Left:
      for (std::size_t j = 0; j <= ny_; ++j) out.push_back(node_index(0, j));
      break;
    case Side::Right:
      for (std::size_t j = 0; j <= ny_; ++j) out.push_back(node_index(nx_, j));
      break;
    case Side::Bottom:
      for (std::size_t i = 0; i <= nx_; ++i) out.push_back(node_index(i, 0));
      break;
    case Side::Top:
      for (std::size_t i = 0; i <= nx_; ++i) out.push_back(node_index(i, ny_));
      break;
  }
  return out;
}

std::vector<std::size_t> StructuredMesh::tagged_nodes(BoundaryTag tag) const
{
  std::vector<std::size_t> out;
  for (const auto &e : edges_)
  {
    if (e.tag == tag)
    {
      out.push_back(e.a);
      out.push_back(e.b);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

StructuredMesh MeshRectangle(Point lower, Point upper, double h, std::array<SideSpec, 4> sides)
{
  if (!(h > 0.0) || !(upper.x > lower.x) || !(upper.y > lower.y))
  {
    throw ArgumentError("MeshRectangle: degenerate rectangle or mesh size");
  }
  const auto count = [h](double len)
  { return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(len / h))); };
  return StructuredMesh(lower, {upper.x - lower.x, upper.y - lower.y}, count(upper.x - lower.x),
                        count(upper.y - lower.y), std::move(sides));
}

ScalarField ScalarField::Constant(double c)
{
  return {[c](double, double) { return c; }, std::to_string(c)};
}

}  // namespace ddpgd::fem
