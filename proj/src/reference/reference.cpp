// SPDX-License-Identifier: Apache-2.0

#include "reference/reference.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

#include "common/error.hpp"
#include "dd/online.hpp"
#include "fem/assembly.hpp"
#include "linalg/spd_solver.hpp"

namespace ddpgd::reference
{

namespace
{

// Four-point Gauss-Legendre rule mapped to [0, 1].
constexpr std::array<double, 4> kGauss4Points{0.069431844202973712, 0.33000947820757187,
                                              0.66999052179242813, 0.93056815579702629};
constexpr std::array<double, 4> kGauss4Weights{0.17392742256872693, 0.32607257743127307,
                                               0.32607257743127307, 0.17392742256872693};

bool HasNeumannEdges(const fem::StructuredMesh &mesh, const std::string &label)
{
  return std::any_of(mesh.boundary_edges().begin(), mesh.boundary_edges().end(),
                     [&](const fem::BoundaryEdge &e)
                     { return e.tag == fem::BoundaryTag::ExteriorNeumann && e.label == label; });
}

double MaxAbs(std::span<const double> v)
{
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

LocalSolver::LocalSolver(const fem::StructuredMesh &mesh, const dd::ProblemData &data,
                         const dd::ParamValues &mu, std::vector<std::size_t> trace_nodes)
{
  const auto K = fem::AssembleStiffness(mesh, data.DiffusionAt(mu));
  Vector b = fem::AssembleLoad(mesh, data.SourceAt(mu));
  std::set<std::string> labels;
  for (const auto &t : data.neumann) labels.insert(t.side);
  for (const auto &label : labels)
  {
    if (HasNeumannEdges(mesh, label))
    {
      linalg::Axpy(1.0, fem::AssembleNeumann(mesh, data.NeumannAt(label, mu), label), b);
    }
  }
  std::vector<std::size_t> fixed = mesh.tagged_nodes(fem::BoundaryTag::ExteriorDirichlet);
  n_dirichlet_ = fixed.size();
  n_trace_ = trace_nodes.size();
  fixed.insert(fixed.end(), trace_nodes.begin(), trace_nodes.end());
  const Vector zeros(fixed.size(), 0.0);
  rs_ = fem::EliminateDirichlet(K, b, fixed, zeros);
  b_free_ = rs_.rhs;
  llt_.emplace(rs_.A_free);
}

Vector LocalSolver::Solve(std::span<const double> trace_values) const
{
  if (trace_values.size() != n_trace_)
  {
    throw ArgumentError("expected " + std::to_string(n_trace_) + " trace values");
  }
  Vector values(n_dirichlet_, 0.0);
  values.insert(values.end(), trace_values.begin(), trace_values.end());
  Vector rhs = b_free_;
  if (n_trace_ > 0)
  {
    linalg::Axpy(-1.0, rs_.A_coupling * values, rhs);
  }
  return rs_.Expand(llt_->Solve(rhs), values);
}

Vector SolveLocal(const fem::StructuredMesh &mesh, const dd::ProblemData &data,
                  const dd::ParamValues &mu, std::span<const std::size_t> trace_nodes,
                  std::span<const double> trace_values)
{
  if (trace_nodes.size() != trace_values.size())
  {
    throw ArgumentError("trace nodes and values differ in length");
  }
  return LocalSolver(mesh, data, mu, {trace_nodes.begin(), trace_nodes.end()}).Solve(trace_values);
}

Vector FullOrderSolve(const GlobalProblem &gp, const dd::ParamValues &mu)
{
  return SolveLocal(dd::GlobalMesh(gp.geometry), gp.data, mu);
}

SchwarzResult AlternatingSchwarz(const std::vector<dd::Subdomain> &subdomains,
                                 const dd::ProblemData &data, const dd::ParamValues &mu, double tol,
                                 std::size_t max_iters, const std::vector<Vector> *initial_traces)
{
  if (!(tol > 0.0) || max_iters == 0)
  {
    throw ArgumentError("Schwarz tolerance and iteration limit must be positive");
  }
  const std::size_t n = subdomains.size();
  auto index_of = [&](const std::string &id)
  {
    for (std::size_t i = 0; i < n; ++i)
    {
      if (subdomains[i].id == id) return i;
    }
    throw ArgumentError("no subdomain '" + id + "'");
  };
  // maps[i][b] restricts the neighbour across block b of subdomain i.
  std::vector<std::vector<std::pair<std::size_t, dd::InterfaceMap>>> maps(n);
  for (std::size_t i = 0; i < n; ++i)
  {
    for (std::size_t b = 0; b < subdomains[i].interfaces.size(); ++b)
    {
      const std::size_t j = index_of(subdomains[i].interfaces[b].neighbor);
      maps[i].emplace_back(j, dd::BuildInterfaceMap(subdomains[j], subdomains[i], b));
    }
  }
  if (initial_traces && initial_traces->size() != n)
  {
    throw ArgumentError("one initial trace per subdomain is required");
  }

  SchwarzResult r;
  r.fields.resize(n);
  r.traces.resize(n);
  for (std::size_t i = 0; i < n; ++i)
  {
    r.traces[i] = initial_traces ? initial_traces->at(i) : Vector(subdomains[i].interface_size(), 0.0);
    if (r.traces[i].size() != subdomains[i].interface_size())
    {
      throw ArgumentError("initial trace of '" + subdomains[i].id + "' has the wrong length");
    }
  }
  std::vector<char> solved(n, 0);
  std::vector<LocalSolver> solvers;
  for (const auto &sd : subdomains) solvers.emplace_back(sd.mesh, data, mu, sd.InterfaceNodes());
  const std::vector<std::vector<std::size_t>> nodes = [&]
  {
    std::vector<std::vector<std::size_t>> out;
    for (const auto &sd : subdomains) out.push_back(sd.InterfaceNodes());
    return out;
  }();

  while (r.iterations < max_iters)
  {
    for (std::size_t i = 0; i < n; ++i)
    {
      for (const auto &[j, map] : maps[i])
      {
        if (!solved[j]) continue;
        for (const auto &[node, pos] : map.pairs) r.traces[i][pos] = r.fields[j][node];
      }
      r.fields[i] = solvers[i].Solve(r.traces[i]);
      solved[i] = 1;
    }
    ++r.iterations;
    double mismatch = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
      for (const auto &[j, map] : maps[i])
      {
        for (const auto &[node, pos] : map.pairs)
        {
          mismatch = std::max(mismatch, std::abs(r.fields[i][nodes[i][pos]] - r.fields[j][node]));
        }
      }
    }
    r.history.push_back(mismatch);
    if (mismatch < tol)
    {
      r.converged = true;
      break;
    }
  }
  return r;
}

double RelL2Error(const fem::StructuredMesh &mesh, std::span<const double> field,
                  const std::function<double(double, double)> &exact)
{
  if (field.size() != mesh.num_nodes())
  {
    throw ArgumentError("field length does not match the mesh");
  }
  const double hx = mesh.hx();
  const double hy = mesh.hy();
  double err = 0.0;
  double ref = 0.0;
  for (std::size_t e = 0; e < mesh.num_elements(); ++e)
  {
    const auto nodes = mesh.element(e);
    const fem::Point p0 = mesh.node(nodes[0]);
    for (std::size_t a = 0; a < 4; ++a)
    {
      for (std::size_t c = 0; c < 4; ++c)
      {
        const double xi = kGauss4Points[a];
        const double eta = kGauss4Points[c];
        const double uh = field[nodes[0]] * (1 - xi) * (1 - eta) + field[nodes[1]] * xi * (1 - eta) +
                          field[nodes[2]] * xi * eta + field[nodes[3]] * (1 - xi) * eta;
        const double u = exact(p0.x + xi * hx, p0.y + eta * hy);
        const double w = kGauss4Weights[a] * kGauss4Weights[c] * hx * hy;
        err += w * (uh - u) * (uh - u);
        ref += w * u * u;
      }
    }
  }
  return ref == 0.0 ? std::sqrt(err) : std::sqrt(err / ref);
}

double RelLinfError(std::span<const double> a, std::span<const double> b)
{
  if (a.size() != b.size())
  {
    throw ArgumentError("fields differ in length");
  }
  double diff = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) diff = std::max(diff, std::abs(a[k] - b[k]));
  const double scale = MaxAbs(b);
  return scale == 0.0 ? diff : diff / scale;
}

Vector RestrictToMesh(const fem::StructuredMesh &global, std::span<const double> field,
                      const fem::StructuredMesh &local)
{
  if (field.size() != global.num_nodes())
  {
    throw ArgumentError("field length does not match the mesh");
  }
  Vector out(local.num_nodes());
  for (std::size_t n = 0; n < local.num_nodes(); ++n)
  {
    const fem::Point p = local.node(n);
    const double fi = (p.x - global.origin().x) / global.hx();
    const double fj = (p.y - global.origin().y) / global.hy();
    const double ri = std::round(fi);
    const double rj = std::round(fj);
    if (std::abs(fi - ri) > 1e-9 || std::abs(fj - rj) > 1e-9 || ri < 0 || rj < 0 ||
        ri > static_cast<double>(global.nx()) || rj > static_cast<double>(global.ny()))
    {
      throw ArgumentError("local mesh node is not a node of the global mesh");
    }
    out[n] = field[global.node_index(static_cast<std::size_t>(ri), static_cast<std::size_t>(rj))];
  }
  return out;
}

}  // namespace ddpgd::reference
