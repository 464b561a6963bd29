// SPDX-License-Identifier: Apache-2.0

#include "fem/assembly.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "common/counters.hpp"
#include "common/error.hpp"

namespace ddpgd::fem
{

namespace
{

// Two-point Gauss rule on [0, 1].
constexpr double kGaussOffset = 0.28867513459481288225;  // 0.5 / sqrt(3)
constexpr std::array<double, 2> kGaussPoints{0.5 - kGaussOffset, 0.5 + kGaussOffset};
constexpr double kGaussWeight = 0.5;

std::array<double, 4> Shape(double xi, double eta)
{
  return {(1 - xi) * (1 - eta), xi * (1 - eta), xi * eta, (1 - xi) * eta};
}

// Reference-coordinate derivatives (d/dxi, d/deta).
std::array<std::array<double, 2>, 4> ShapeGrad(double xi, double eta)
{
  return {{{-(1 - eta), -(1 - xi)}, {1 - eta, -xi}, {eta, xi}, {-eta, 1 - xi}}};
}

}  // namespace

linalg::SparseMatrix AssembleStiffness(const StructuredMesh &mesh, const ScalarField &a)
{
  counters::CountAssembly();
  const double hx = mesh.hx();
  const double hy = mesh.hy();
  const double jac = hx * hy;
  std::vector<linalg::Triplet> trip;
  trip.reserve(16 * mesh.num_elements());
  for (std::size_t e = 0; e < mesh.num_elements(); ++e)
  {
    const auto nodes = mesh.element(e);
    const Point p0 = mesh.node(nodes[0]);
    std::array<std::array<double, 4>, 4> ke{};
    for (double xi : kGaussPoints)
    {
      for (double eta : kGaussPoints)
      {
        const double w = kGaussWeight * kGaussWeight * jac * a(p0.x + xi * hx, p0.y + eta * hy);
        const auto g = ShapeGrad(xi, eta);
        for (int p = 0; p < 4; ++p)
        {
          for (int q = 0; q < 4; ++q)
          {
            ke[p][q] += w * (g[p][0] * g[q][0] / (hx * hx) + g[p][1] * g[q][1] / (hy * hy));
          }
        }
      }
    }
    for (int p = 0; p < 4; ++p)
    {
      for (int q = 0; q < 4; ++q)
      {
        trip.push_back({nodes[p], nodes[q], ke[p][q]});
      }
    }
  }
  return linalg::SparseMatrix::FromTriplets(mesh.num_nodes(), mesh.num_nodes(), trip);
}

linalg::Vector AssembleLoad(const StructuredMesh &mesh, const ScalarField &f)
{
  counters::CountAssembly();
  const double hx = mesh.hx();
  const double hy = mesh.hy();
  linalg::Vector b(mesh.num_nodes(), 0.0);
  for (std::size_t e = 0; e < mesh.num_elements(); ++e)
  {
    const auto nodes = mesh.element(e);
    const Point p0 = mesh.node(nodes[0]);
    for (double xi : kGaussPoints)
    {
      for (double eta : kGaussPoints)
      {
        const double w = kGaussWeight * kGaussWeight * hx * hy * f(p0.x + xi * hx, p0.y + eta * hy);
        const auto N = Shape(xi, eta);
        for (int p = 0; p < 4; ++p)
        {
          b[nodes[p]] += w * N[p];
        }
      }
    }
  }
  return b;
}

linalg::Vector AssembleNeumann(const StructuredMesh &mesh, const ScalarField &g,
                               const std::string &label)
{
  counters::CountAssembly();
  linalg::Vector b(mesh.num_nodes(), 0.0);
  bool found = false;
  for (const auto &edge : mesh.boundary_edges())
  {
    if (edge.label != label)
    {
      continue;
    }
    found = true;
    const Point pa = mesh.node(edge.a);
    const Point pb = mesh.node(edge.b);
    const double len = std::hypot(pb.x - pa.x, pb.y - pa.y);
    for (double t : kGaussPoints)
    {
      const double w = kGaussWeight * len * g(pa.x + t * (pb.x - pa.x), pa.y + t * (pb.y - pa.y));
      b[edge.a] += w * (1 - t);
      b[edge.b] += w * t;
    }
  }
  if (!found)
  {
    throw ConfigError("no boundary edge labelled '" + label + "'");
  }
  return b;
}

std::vector<std::size_t> InterfaceNodes(const StructuredMesh &mesh, const std::string &label)
{
  const auto dirichlet = mesh.tagged_nodes(BoundaryTag::ExteriorDirichlet);
  std::vector<std::size_t> out;
  for (const auto &edge : mesh.boundary_edges())
  {
    if (edge.tag != BoundaryTag::Interface || (!label.empty() && edge.label != label))
    {
      continue;
    }
    for (std::size_t n : {edge.a, edge.b})
    {
      if (!std::binary_search(dirichlet.begin(), dirichlet.end(), n))
      {
        out.push_back(n);
      }
    }
  }
  std::sort(out.begin(), out.end(),
            [&mesh](std::size_t a, std::size_t b)
            {
              const Point pa = mesh.node(a);
              const Point pb = mesh.node(b);
              return pa.x < pb.x || (pa.x == pb.x && pa.y < pb.y);
            });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::size_t> FreeNodes(std::size_t n, std::span<const std::size_t> fixed)
{
  std::vector<char> is_fixed(n, 0);
  for (std::size_t f : fixed)
  {
    if (f >= n)
    {
      throw ArgumentError("fixed node index out of range");
    }
    if (is_fixed[f])
    {
      throw ArgumentError("fixed nodes must be distinct");
    }
    is_fixed[f] = 1;
  }
  std::vector<std::size_t> out;
  out.reserve(n - fixed.size());
  for (std::size_t i = 0; i < n; ++i)
  {
    if (!is_fixed[i])
    {
      out.push_back(i);
    }
  }
  return out;
}

ReducedSystem EliminateDirichlet(const linalg::SparseMatrix &A, std::span<const double> b,
                                 std::span<const std::size_t> fixed_nodes,
                                 std::span<const double> fixed_values)
{
  if (A.rows() != A.cols() || b.size() != A.rows() || fixed_nodes.size() != fixed_values.size())
  {
    throw ArgumentError("EliminateDirichlet: dimension mismatch");
  }
  ReducedSystem rs;
  rs.fixed_nodes.assign(fixed_nodes.begin(), fixed_nodes.end());
  rs.free_nodes = FreeNodes(A.rows(), fixed_nodes);
  rs.A_free = A.Extract(rs.free_nodes, rs.free_nodes);
  rs.A_coupling = A.Extract(rs.free_nodes, rs.fixed_nodes);
  rs.rhs.resize(rs.free_nodes.size());
  for (std::size_t k = 0; k < rs.free_nodes.size(); ++k)
  {
    rs.rhs[k] = b[rs.free_nodes[k]];
  }
  if (!rs.fixed_nodes.empty())
  {
    const linalg::Vector lifted = rs.A_coupling * fixed_values;
    linalg::Axpy(-1.0, lifted, rs.rhs);
  }
  return rs;
}

linalg::Vector ReducedSystem::Expand(std::span<const double> free_values,
                                     std::span<const double> fixed_values) const
{
  linalg::Vector out(free_nodes.size() + fixed_nodes.size(), 0.0);
  for (std::size_t k = 0; k < free_nodes.size(); ++k)
  {
    out[free_nodes[k]] = free_values[k];
  }
  for (std::size_t k = 0; k < fixed_nodes.size(); ++k)
  {
    out[fixed_nodes[k]] = fixed_values[k];
  }
  return out;
}

}  // namespace ddpgd::fem
