// SPDX-License-Identifier: Apache-2.0

#ifndef DDPGD_FEM_MESH_HPP
#define DDPGD_FEM_MESH_HPP

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace ddpgd::fem
{

struct Point
{
  double x = 0.0;
  double y = 0.0;
};

enum class Side : int
{
  Left = 0,
  Right = 1,
  Bottom = 2,
  Top = 3
};

inline constexpr std::array<Side, 4> kAllSides{Side::Left, Side::Right, Side::Bottom, Side::Top};

const char *ToString(Side side);
Side SideFromString(const std::string &name);

enum class BoundaryTag
{
  ExteriorDirichlet,
  ExteriorNeumann,
  Interface
};

const char *ToString(BoundaryTag tag);

// Classification of one side of the mesh rectangle. The label identifies the side for
// Neumann data ("left", "right", ...) or the neighbouring subdomain for interfaces.
struct SideSpec
{
  BoundaryTag tag = BoundaryTag::ExteriorDirichlet;
  std::string label;
};

struct BoundaryEdge
{
  Side side;
  std::size_t a;
  std::size_t b;
  BoundaryTag tag;
  std::string label;
};

//
// Uniform nx-by-ny quadrilateral mesh of an axis-aligned rectangle. Node (i, j) has index
// j * (nx + 1) + i; element (i, j) lists its nodes counter-clockwise from the lower left.
//
class StructuredMesh
{
public:
  StructuredMesh(Point origin, Point extent, std::size_t nx, std::size_t ny,
                 std::array<SideSpec, 4> sides = {});

  const Point &origin() const { return origin_; }
  const Point &extent() const { return extent_; }
  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  double hx() const { return extent_.x / static_cast<double>(nx_); }
  double hy() const { return extent_.y / static_cast<double>(ny_); }

  std::size_t num_nodes() const { return (nx_ + 1) * (ny_ + 1); }
  std::size_t num_elements() const { return nx_ * ny_; }
  std::size_t node_index(std::size_t i, std::size_t j) const { return j * (nx_ + 1) + i; }

  Point node(std::size_t n) const;
  const std::vector<Point> &node_coords() const { return coords_; }
  std::array<std::size_t, 4> element(std::size_t e) const;
  const std::vector<BoundaryEdge> &boundary_edges() const { return edges_; }
  const SideSpec &side(Side s) const { return sides_[static_cast<int>(s)]; }
  const std::array<SideSpec, 4> &sides() const { return sides_; }

  // Nodes lying on the given side, ascending along the side.
  std::vector<std::size_t> side_nodes(Side s) const;

  // Nodes on any edge carrying the tag, sorted and unique.
  std::vector<std::size_t> tagged_nodes(BoundaryTag tag) const;

private:
  Point origin_;
  Point extent_;
  std::size_t nx_;
  std::size_t ny_;
  std::array<SideSpec, 4> sides_;
  std::vector<Point> coords_;
  std::vector<BoundaryEdge> edges_;
};

// Uniform mesh with element size as close as possible to h in each direction.
StructuredMesh MeshRectangle(Point lower, Point upper, double h, std::array<SideSpec, 4> sides = {});

// Spatial coefficient or data factor a(x, y).
struct ScalarField
{
  std::function<double(double, double)> eval;
  std::string description;

  double operator()(double x, double y) const { return eval(x, y); }
  static ScalarField Constant(double c);
};

}  // namespace ddpgd::fem

#endif  // DDPGD_FEM_MESH_HPP
