// SPDX-License-Identifier: Apache-2.0

#include "dd/online.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "common/error.hpp"

namespace ddpgd::dd
{

namespace
{

constexpr double kMatchTol = 1e-9;

// Node of `mesh` at point p, if any, within kMatchTol * h.
std::optional<std::size_t> FindNode(const fem::StructuredMesh &mesh, fem::Point p)
{
  const double fi = (p.x - mesh.origin().x) / mesh.hx();
  const double fj = (p.y - mesh.origin().y) / mesh.hy();
  const double ri = std::round(fi);
  const double rj = std::round(fj);
  if (ri < 0 || rj < 0 || ri > static_cast<double>(mesh.nx()) || rj > static_cast<double>(mesh.ny()))
  {
    return std::nullopt;
  }
  const std::size_t n = mesh.node_index(static_cast<std::size_t>(ri), static_cast<std::size_t>(rj));
  const fem::Point q = mesh.node(n);
  const double h = std::min(mesh.hx(), mesh.hy());
  if (std::abs(q.x - p.x) > kMatchTol * h || std::abs(q.y - p.y) > kMatchTol * h)
  {
    return std::nullopt;
  }
  return n;
}

}  // namespace

InterfaceMap BuildInterfaceMap(const Subdomain &source, const Subdomain &target,
                               std::size_t target_block)
{
  if (target_block >= target.interfaces.size())
  {
    throw ArgumentError("interface block index out of range");
  }
  InterfaceMap map{source.id, target.id, target_block, {}};
  std::size_t pos = 0;
  for (std::size_t b = 0; b < target_block; ++b) pos += target.interfaces[b].nodes.size();
  for (std::size_t n : target.interfaces[target_block].nodes)
  {
    const fem::Point p = target.mesh.node(n);
    const auto m = FindNode(source.mesh, p);
    if (!m)
    {
      std::ostringstream msg;
      msg << "interface node (" << p.x << ", " << p.y << ") of '" << target.id
          << "' has no matching node in '" << source.id << "'";
      throw ConfigError(msg.str());
    }
    map.pairs.emplace_back(*m, pos++);
  }
  return map;
}

SchwarzProblem::SchwarzProblem(std::vector<std::shared_ptr<const SurrogateModel>> models,
                               const ParamValues &mu, linalg::GmresConfig gmres)
  : models_(std::move(models)), mu_(mu), gmres_(gmres)
{
  if (models_.empty())
  {
    throw ArgumentError("SchwarzProblem needs at least one model");
  }
  if (!(gmres_.rel_tol > 0.0) || gmres_.max_iters == 0)
  {
    throw ArgumentError("GMRES tolerance and iteration limit must be positive");
  }
  for (std::size_t i = 0; i < models_.size(); ++i)
  {
    if (!models_[i]) throw ArgumentError("null model");
    for (std::size_t j = 0; j < i; ++j)
    {
      if (models_[j]->subdomain.id == models_[i]->subdomain.id)
      {
        throw ArgumentError("duplicate subdomain '" + models_[i]->subdomain.id + "'");
      }
    }
  }
  offsets_.assign(1, 0);
  map_of_block_.resize(models_.size());
  for (std::size_t i = 0; i < models_.size(); ++i)
  {
    const auto &sd = models_[i]->subdomain;
    offsets_.push_back(offsets_.back() + sd.interface_size());
    for (std::size_t b = 0; b < sd.interfaces.size(); ++b)
    {
      const std::size_t j = index_of(sd.interfaces[b].neighbor);
      map_of_block_[i].push_back(maps_.size());
      maps_.push_back(BuildInterfaceMap(models_[j]->subdomain, sd, b));
    }
  }
  for (const auto &m : models_)
  {
    const auto tuple = m->grid.Select(mu_);
    CachedEvaluation c{m->u0.Evaluate(tuple), {}};
    c.uq.reserve(m->uq.size());
    for (const auto &t : m->uq) c.uq.push_back(t.Evaluate(tuple));
    cache_.push_back(std::move(c));
  }
}

std::size_t SchwarzProblem::index_of(const std::string &id) const
{
  for (std::size_t i = 0; i < models_.size(); ++i)
  {
    if (models_[i]->subdomain.id == id) return i;
  }
  throw ArgumentError("no model for subdomain '" + id + "'");
}

linalg::Vector SchwarzProblem::OperatorApply(std::size_t j, std::span<const double> lambda_j) const
{
  const auto &c = cache_.at(j);
  if (lambda_j.size() != c.uq.size())
  {
    throw ArgumentError("trace vector of subdomain '" + models_[j]->subdomain.id + "' has length " +
                        std::to_string(lambda_j.size()) + ", expected " + std::to_string(c.uq.size()));
  }
  linalg::Vector out(c.u0.size(), 0.0);
  for (std::size_t q = 0; q < lambda_j.size(); ++q)
  {
    if (lambda_j[q] != 0.0) linalg::Axpy(lambda_j[q], c.uq[q], out);
  }
  return out;
}

linalg::Vector SchwarzProblem::InterfaceMatvec(std::span<const double> lambda) const
{
  if (lambda.size() != total_interface_size())
  {
    throw ArgumentError("stacked trace vector has the wrong length");
  }
  std::vector<linalg::Vector> fields;
  fields.reserve(models_.size());
  for (std::size_t j = 0; j < models_.size(); ++j)
  {
    fields.push_back(OperatorApply(j, lambda.subspan(offsets_[j], offsets_[j + 1] - offsets_[j])));
  }
  linalg::Vector out(lambda.begin(), lambda.end());
  for (std::size_t i = 0; i < models_.size(); ++i)
  {
    for (std::size_t m : map_of_block_[i])
    {
      const auto &map = maps_[m];
      const auto &src = fields[index_of(map.source)];
      for (const auto &[node, pos] : map.pairs) out[offsets_[i] + pos] -= src[node];
    }
  }
  return out;
}

linalg::Vector SchwarzProblem::InterfaceRhs() const
{
  linalg::Vector out(total_interface_size(), 0.0);
  for (std::size_t i = 0; i < models_.size(); ++i)
  {
    for (std::size_t m : map_of_block_[i])
    {
      const auto &map = maps_[m];
      const auto &src = cache_[index_of(map.source)].u0;
      for (const auto &[node, pos] : map.pairs) out[offsets_[i] + pos] = src[node];
    }
  }
  return out;
}

linalg::GmresResult SchwarzProblem::SolveInterface() const
{
  const linalg::Vector rhs = InterfaceRhs();
  return linalg::Gmres([this](std::span<const double> x, std::span<double> y)
                       {
                         const auto r = InterfaceMatvec(x);
                         std::copy(r.begin(), r.end(), y.begin());
                       },
                       rhs, gmres_);
}

linalg::Vector SchwarzProblem::LocalField(std::size_t i, std::span<const double> lambda) const
{
  if (lambda.size() != total_interface_size())
  {
    throw ArgumentError("stacked trace vector has the wrong length");
  }
  auto u = OperatorApply(i, lambda.subspan(offsets_[i], offsets_[i + 1] - offsets_[i]));
  linalg::Axpy(1.0, cache_[i].u0, u);
  return u;
}

GlobalSolution SchwarzProblem::Reconstruct(std::span<const double> lambda) const
{
  fem::Point lo{std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
  fem::Point hi{std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};
  const double hx = models_[0]->subdomain.mesh.hx();
  const double hy = models_[0]->subdomain.mesh.hy();
  for (const auto &m : models_)
  {
    const auto &r = m->subdomain.rect;
    lo = {std::min(lo.x, r.lower.x), std::min(lo.y, r.lower.y)};
    hi = {std::max(hi.x, r.upper.x), std::max(hi.y, r.upper.y)};
    if (std::abs(m->subdomain.mesh.hx() - hx) > kMatchTol * hx ||
        std::abs(m->subdomain.mesh.hy() - hy) > kMatchTol * hy)
    {
      throw ArgumentError("subdomain meshes do not share one mesh size");
    }
  }
  const auto nx = static_cast<std::size_t>(std::llround((hi.x - lo.x) / hx));
  const auto ny = static_cast<std::size_t>(std::llround((hi.y - lo.y) / hy));
  GlobalSolution g{fem::StructuredMesh(lo, {hi.x - lo.x, hi.y - lo.y}, nx, ny), {}, {}, {}, 0.0};
  g.field.assign(g.mesh.num_nodes(), 0.0);
  std::vector<char> owned(g.mesh.num_nodes(), 0);
  for (std::size_t i = 0; i < models_.size(); ++i)
  {
    const auto &mesh = models_[i]->subdomain.mesh;
    auto u = LocalField(i, lambda);
    std::vector<std::size_t> l2g(mesh.num_nodes());
    for (std::size_t n = 0; n < mesh.num_nodes(); ++n)
    {
      const auto gn = FindNode(g.mesh, mesh.node(n));
      if (!gn)
      {
        throw ArgumentError("subdomain meshes do not coincide on a common lattice");
      }
      l2g[n] = *gn;
      if (!owned[*gn])
      {
        owned[*gn] = 1;
        g.field[*gn] = u[n];
      }
      else
      {
        g.overlap_mismatch = std::max(g.overlap_mismatch, std::abs(g.field[*gn] - u[n]));
      }
    }
    g.local_fields.push_back(std::move(u));
    g.local_to_global.push_back(std::move(l2g));
  }
  if (std::find(owned.begin(), owned.end(), 0) != owned.end())
  {
    throw ArgumentError("subdomains do not cover their bounding box");
  }
  return g;
}

void CheckCompatible(const SurrogateModel &model, const Subdomain &expected,
                     const separated::ParamGrid &grid)
{
  const auto &sd = model.subdomain;
  auto fail = [&](const std::string &what)
  {
    throw ConfigError("model for '" + sd.id + "' does not match the experiment: " + what);
  };
  if (sd.id != expected.id) fail("subdomain id differs ('" + expected.id + "' expected)");
  const double h = std::min(expected.mesh.hx(), expected.mesh.hy());
  const auto &a = sd.rect;
  const auto &b = expected.rect;
  if (std::abs(a.lower.x - b.lower.x) > kMatchTol * h || std::abs(a.lower.y - b.lower.y) > kMatchTol * h ||
      std::abs(a.upper.x - b.upper.x) > kMatchTol * h || std::abs(a.upper.y - b.upper.y) > kMatchTol * h)
  {
    fail("rectangle differs");
  }
  if (sd.mesh.nx() != expected.mesh.nx() || sd.mesh.ny() != expected.mesh.ny()) fail("mesh differs");
  if (sd.InterfaceNodes() != expected.InterfaceNodes()) fail("interface nodes differ");
  for (const auto &axis : model.grid.axes())
  {
    const auto d = grid.Find(axis.name());
    if (!d) fail("grid mismatch: parameter '" + axis.name() + "' is unknown");
    if (!(grid.axis(*d) == axis)) fail("grid mismatch on parameter '" + axis.name() + "'");
  }
}

void RequireConverged(const linalg::GmresResult &r)
{
  if (r.converged()) return;
  std::ostringstream msg;
  msg.precision(3);
  msg << "GMRES " << linalg::ToString(r.status) << " after " << r.iterations
      << " iterations, relative residual " << r.final_relative_residual << "; history:";
  for (double h : r.residual_history) msg << ' ' << h;
  throw SolverError(msg.str());
}

}  // namespace ddpgd::dd
