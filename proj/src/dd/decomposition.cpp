// SPDX-License-Identifier: Apache-2.0

#include "dd/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "common/error.hpp"

namespace ddpgd::dd
{

std::vector<std::size_t> Subdomain::InterfaceNodes() const
{
  std::vector<std::size_t> out;
  for (const auto &b : interfaces) out.insert(out.end(), b.nodes.begin(), b.nodes.end());
  return out;
}

std::size_t Subdomain::interface_size() const
{
  std::size_t n = 0;
  for (const auto &b : interfaces) n += b.nodes.size();
  return n;
}

std::vector<std::size_t> Subdomain::FixedNodes() const
{
  auto out = InterfaceNodes();
  out.insert(out.end(), exterior_dirichlet_nodes.begin(), exterior_dirichlet_nodes.end());
  std::sort(out.begin(), out.end());
  return out;
}

namespace
{

constexpr double kRel = 1e-9;

bool Near(double a, double b, double h) { return std::abs(a - b) <= kRel * h; }

// Number of mesh steps from `origin` to `v`; throws when v is off the lattice.
long LatticeIndex(double v, double origin, double h, const std::string &what)
{
  const double r = (v - origin) / h;
  const double k = std::round(r);
  if (std::abs(r - k) > 1e-6)
  {
    throw ConfigError(what + " = " + std::to_string(v) + " is not a multiple of h from the domain origin");
  }
  return static_cast<long>(k);
}

// Side segment as (fixed coordinate, lo, hi, normal axis is x?).
struct Segment
{
  double c;
  double lo;
  double hi;
  bool vertical;
};

Segment SideSegment(const Rectangle &r, fem::Side s)
{
  switch (s)
  {
    case fem::Side::Left: return {r.lower.x, r.lower.y, r.upper.y, true};
    case fem::Side::Right: return {r.upper.x, r.lower.y, r.upper.y, true};
    case fem::Side::Bottom: return {r.lower.y, r.lower.x, r.upper.x, false};
    case fem::Side::Top: return {r.upper.y, r.lower.x, r.upper.x, false};
  }
  return {};
}

std::array<fem::SideSpec, 4> ExteriorSpecs(const Geometry &g)
{
  std::array<fem::SideSpec, 4> specs;
  for (fem::Side s : fem::kAllSides)
  {
    specs[static_cast<int>(s)] = {g.exterior_kind(s) == ExteriorKind::Dirichlet
                                      ? fem::BoundaryTag::ExteriorDirichlet
                                      : fem::BoundaryTag::ExteriorNeumann,
                                  fem::ToString(s)};
  }
  return specs;
}

void ValidateGeometry(const Geometry &g)
{
  if (!(g.h > 0.0))
  {
    throw ConfigError("mesh size h must be positive");
  }
  const auto &d = g.domain;
  if (!(d.upper.x > d.lower.x && d.upper.y > d.lower.y))
  {
    throw ConfigError("domain rectangle is degenerate");
  }
  LatticeIndex(d.upper.x, d.lower.x, g.h, "domain upper x");
  LatticeIndex(d.upper.y, d.lower.y, g.h, "domain upper y");
  if (g.subdomains.empty())
  {
    throw ConfigError("at least one subdomain is required");
  }
  std::set<std::string> ids;
  for (const auto &r : g.subdomains)
  {
    if (r.id.empty() || !ids.insert(r.id).second)
    {
      throw ConfigError("subdomain ids must be non-empty and unique ('" + r.id + "')");
    }
    if (!(r.upper.x > r.lower.x && r.upper.y > r.lower.y))
    {
      throw ConfigError("subdomain '" + r.id + "' is degenerate");
    }
    const double tol = kRel * g.h;
    if (r.lower.x < d.lower.x - tol || r.lower.y < d.lower.y - tol ||
        r.upper.x > d.upper.x + tol || r.upper.y > d.upper.y + tol)
    {
      throw ConfigError("subdomain '" + r.id + "' extends outside the domain");
    }
    LatticeIndex(r.lower.x, d.lower.x, g.h, "subdomain '" + r.id + "' lower x");
    LatticeIndex(r.upper.x, d.lower.x, g.h, "subdomain '" + r.id + "' upper x");
    LatticeIndex(r.lower.y, d.lower.y, g.h, "subdomain '" + r.id + "' lower y");
    LatticeIndex(r.upper.y, d.lower.y, g.h, "subdomain '" + r.id + "' upper y");
  }
  // Every lattice node must belong to some closed subdomain rectangle.
  const long nx = LatticeIndex(d.upper.x, d.lower.x, g.h, "domain upper x");
  const long ny = LatticeIndex(d.upper.y, d.lower.y, g.h, "domain upper y");
  for (long j = 0; j <= ny; ++j)
  {
    for (long i = 0; i <= nx; ++i)
    {
      const double x = d.lower.x + i * g.h;
      const double y = d.lower.y + j * g.h;
      const double tol = kRel * g.h;
      const bool covered = std::any_of(g.subdomains.begin(), g.subdomains.end(),
                                       [&](const Rectangle &r)
                                       {
                                         return x >= r.lower.x - tol && x <= r.upper.x + tol &&
                                                y >= r.lower.y - tol && y <= r.upper.y + tol;
                                       });
      if (!covered)
      {
        throw ConfigError("subdomains do not cover the domain near (" + std::to_string(x) + ", " +
                          std::to_string(y) + ")");
      }
    }
  }
}

}  // namespace

fem::StructuredMesh GlobalMesh(const Geometry &geometry)
{
  ValidateGeometry(geometry);
  return fem::MeshRectangle(geometry.domain.lower, geometry.domain.upper, geometry.h,
                            ExteriorSpecs(geometry));
}

std::vector<Subdomain> Decompose(const Geometry &geometry)
{
  ValidateGeometry(geometry);
  const auto &d = geometry.domain;
  const double tol = kRel * geometry.h;
  const auto exterior = ExteriorSpecs(geometry);

  std::vector<Subdomain> out;
  for (const auto &r : geometry.subdomains)
  {
    std::array<fem::SideSpec, 4> specs;
    std::vector<std::pair<fem::Side, std::string>> neighbours;
    for (fem::Side s : fem::kAllSides)
    {
      const Segment seg = SideSegment(r, s);
      const Segment outer = SideSegment(d, s);
      if (Near(seg.c, outer.c, geometry.h))
      {
        specs[static_cast<int>(s)] = exterior[static_cast<int>(s)];
        continue;
      }
      std::vector<std::string> found;
      for (const auto &o : geometry.subdomains)
      {
        if (o.id == r.id) continue;
        const double olo = seg.vertical ? o.lower.x : o.lower.y;
        const double ohi = seg.vertical ? o.upper.x : o.upper.y;
        const double tlo = seg.vertical ? o.lower.y : o.lower.x;
        const double thi = seg.vertical ? o.upper.y : o.upper.x;
        const bool strictly_inside = seg.c > olo + tol && seg.c < ohi - tol;
        const bool spans = tlo <= seg.lo + tol && thi >= seg.hi - tol;
        const bool touches = seg.c >= olo - tol && seg.c <= ohi + tol &&
                             std::min(thi, seg.hi) > std::max(tlo, seg.lo) + tol;
        if (strictly_inside && spans)
        {
          found.push_back(o.id);
        }
        else if (touches && strictly_inside)
        {
          throw ConfigError("side " + std::string(fem::ToString(s)) + " of subdomain '" + r.id +
                            "' is only partly covered by '" + o.id + "' (cross-point)");
        }
      }
      if (found.empty())
      {
        throw ConfigError("side " + std::string(fem::ToString(s)) + " of subdomain '" + r.id +
                          "' lies inside the domain but no neighbour overlaps it with positive width");
      }
      if (found.size() > 1)
      {
        throw ConfigError("side " + std::string(fem::ToString(s)) + " of subdomain '" + r.id +
                          "' is covered by several subdomains (cross-point)");
      }
      for (const auto &[side, n] : neighbours)
      {
        if (n == found.front())
        {
          throw ConfigError("subdomain '" + r.id + "' meets '" + n + "' across two sides");
        }
      }
      neighbours.emplace_back(s, found.front());
      specs[static_cast<int>(s)] = {fem::BoundaryTag::Interface, found.front()};
    }

    Subdomain sd{r.id, r, fem::MeshRectangle(r.lower, r.upper, geometry.h, specs), {}, {}};
    sd.exterior_dirichlet_nodes = sd.mesh.tagged_nodes(fem::BoundaryTag::ExteriorDirichlet);
    for (const auto &[side, n] : neighbours)
    {
      InterfaceBlock block{n, side, {}};
      const auto &dir = sd.exterior_dirichlet_nodes;
      for (std::size_t node : sd.mesh.side_nodes(side))
      {
        if (!std::binary_search(dir.begin(), dir.end(), node)) block.nodes.push_back(node);
      }
      if (block.nodes.empty())
      {
        throw ConfigError("interface of '" + r.id + "' towards '" + n + "' has no free nodes");
      }
      sd.interfaces.push_back(std::move(block));
    }
    // An interface corner may also sit on a neighbouring interface side; that would be a
    // cross-point in the node sense.
    auto all = sd.InterfaceNodes();
    std::sort(all.begin(), all.end());
    if (std::adjacent_find(all.begin(), all.end()) != all.end())
    {
      throw ConfigError("interfaces of subdomain '" + r.id + "' share a node (cross-point)");
    }
    out.push_back(std::move(sd));
  }
  return out;
}

TraceBasis::TraceBasis(const Subdomain &sd) : hx_(sd.mesh.hx()), hy_(sd.mesh.hy())
{
  for (std::size_t b = 0; b < sd.interfaces.size(); ++b)
  {
    for (std::size_t n : sd.interfaces[b].nodes)
    {
      nodes_.push_back(n);
      points_.push_back(sd.mesh.node(n));
      block_.push_back(b);
      sides_.push_back(sd.interfaces[b].side);
    }
  }
}

double TraceBasis::Evaluate(std::size_t q, fem::Point p) const
{
  if (q >= nodes_.size())
  {
    throw ArgumentError("trace basis index out of range");
  }
  const fem::Point c = points_[q];
  const bool vertical = sides_[q] == fem::Side::Left || sides_[q] == fem::Side::Right;
  const double h = vertical ? hy_ : hx_;
  const double normal = vertical ? p.x - c.x : p.y - c.y;
  if (std::abs(normal) > kRel * h)
  {
    return 0.0;
  }
  const double t = std::abs(vertical ? p.y - c.y : p.x - c.x) / h;
  return t < 1.0 - kRel ? 1.0 - t : 0.0;
}

}  // namespace ddpgd::dd
