// SPDX-License-Identifier: Apache-2.0

#ifndef DDPGD_DD_DECOMPOSITION_HPP
#define DDPGD_DD_DECOMPOSITION_HPP

#include <string>
#include <vector>

#include "dd/problem.hpp"
#include "fem/mesh.hpp"

namespace ddpgd::dd
{

// One straight interface segment shared with a single neighbour.
struct InterfaceBlock
{
  std::string neighbor;
  fem::Side side;
  // Mesh nodes on the segment minus exterior Dirichlet nodes, ascending by (x, y).
  std::vector<std::size_t> nodes;
};

struct Subdomain
{
  std::string id;
  Rectangle rect;
  fem::StructuredMesh mesh;
  std::vector<std::size_t> exterior_dirichlet_nodes;
  // Ordered left, right, bottom, top.
  std::vector<InterfaceBlock> interfaces;

  // Concatenation of the interface blocks; position in this list is the trace index q.
  std::vector<std::size_t> InterfaceNodes() const;
  std::size_t interface_size() const;
  // Exterior Dirichlet and interface nodes, sorted.
  std::vector<std::size_t> FixedNodes() const;
};

// Builds subdomain meshes and classifies every side. Throws ConfigError for rectangles
// outside the domain or off the mesh lattice, uncovered nodes, sides with zero overlap, and
// cross-points (a side covered by several neighbours).
std::vector<Subdomain> Decompose(const Geometry &geometry);

// Mesh of the whole domain with exterior boundary tags.
fem::StructuredMesh GlobalMesh(const Geometry &geometry);

// Nodal trace basis of a subdomain: one hat per interface node restricted to its segment.
class TraceBasis
{
public:
  explicit TraceBasis(const Subdomain &sd);

  std::size_t size() const { return nodes_.size(); }
  const std::vector<std::size_t> &nodes() const { return nodes_; }
  const std::vector<fem::Point> &points() const { return points_; }
  // eta_q at a point on the interface block that owns q; zero on other blocks.
  double Evaluate(std::size_t q, fem::Point p) const;

private:
  std::vector<std::size_t> nodes_;
  std::vector<fem::Point> points_;
  std::vector<std::size_t> block_;
  std::vector<fem::Side> sides_;
  double hx_;
  double hy_;
};

}  // namespace ddpgd::dd

#endif  // DDPGD_DD_DECOMPOSITION_HPP
