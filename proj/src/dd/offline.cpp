// SPDX-License-Identifier: Apache-2.0

#include "dd/offline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "fem/assembly.hpp"

namespace ddpgd::dd
{

std::size_t SurrogateModel::ModesBefore() const
{
  std::size_t n = 0;
  for (const auto &s : stats) n += s.modes_before;
  return n;
}

std::size_t SurrogateModel::ModesAfter() const
{
  std::size_t n = 0;
  for (const auto &s : stats) n += s.modes_after;
  return n;
}

namespace
{

using Clock = std::chrono::steady_clock;

bool HasNeumannSide(const fem::StructuredMesh &mesh, const std::string &label)
{
  return std::any_of(mesh.boundary_edges().begin(), mesh.boundary_edges().end(),
                     [&](const fem::BoundaryEdge &e)
                     { return e.tag == fem::BoundaryTag::ExteriorNeumann && e.label == label; });
}

bool AllZero(const linalg::Vector &v)
{
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

// Spatial factors assembled once per subdomain; zero contributions are dropped.
struct LocalData
{
  std::vector<linalg::SparseMatrix> operators;
  std::vector<const DataTerm *> operator_terms;
  std::vector<linalg::Vector> loads;
  std::vector<const DataTerm *> load_terms;
};

LocalData AssembleLocal(const Subdomain &sd, const ProblemData &data)
{
  LocalData out;
  for (const auto &t : data.diffusion)
  {
    auto K = fem::AssembleStiffness(sd.mesh, t.spatial);
    if (K.IsZero()) continue;
    out.operators.push_back(std::move(K));
    out.operator_terms.push_back(&t);
  }
  for (const auto &t : data.source)
  {
    auto b = fem::AssembleLoad(sd.mesh, t.spatial);
    if (AllZero(b)) continue;
    out.loads.push_back(std::move(b));
    out.load_terms.push_back(&t);
  }
  for (const auto &t : data.neumann)
  {
    if (!HasNeumannSide(sd.mesh, t.side)) continue;
    auto b = fem::AssembleNeumann(sd.mesh, t.spatial, t.side);
    if (AllZero(b)) continue;
    out.loads.push_back(std::move(b));
    out.load_terms.push_back(&t);
  }
  if (out.operators.empty())
  {
    throw ConfigError("diffusion vanishes on subdomain '" + sd.id + "'");
  }
  return out;
}

separated::ParamGrid ActiveFrom(const LocalData &local, const separated::ParamGrid &grid)
{
  std::vector<separated::ParamAxis> axes;
  for (const auto &axis : grid.axes())
  {
    auto uses = [&](const DataTerm *t)
    {
      return std::any_of(t->factors.begin(), t->factors.end(),
                         [&](const ParametricFactor &f) { return f.axis == axis.name(); });
    };
    if (std::any_of(local.operator_terms.begin(), local.operator_terms.end(), uses) ||
        std::any_of(local.load_terms.begin(), local.load_terms.end(), uses))
    {
      axes.push_back(axis);
    }
  }
  if (axes.empty())
  {
    if (grid.dims() == 0)
    {
      throw ConfigError("the parameter grid has no axes");
    }
    axes.push_back(grid.axis(0));
  }
  return separated::ParamGrid(std::move(axes));
}

}  // namespace

separated::ParamGrid ActiveGrid(const Subdomain &sd, const separated::ParamGrid &grid,
                                const ProblemData &data)
{
  return ActiveFrom(AssembleLocal(sd, data), grid);
}

SurrogateModel BuildSurrogate(const Subdomain &sd, const separated::ParamGrid &grid,
                              const ProblemData &data, const OfflineOptions &opts)
{
  if (!(opts.compress_tol > 0.0))
  {
    throw ConfigError("compression tolerance must be positive");
  }
  const auto start = Clock::now();
  const LocalData local = AssembleLocal(sd, data);

  SurrogateModel model{sd, ActiveFrom(local, grid), {}, {}, opts.pgd.enrich_tol,
                       opts.compress_tol, opts.seed, {}, 0.0};

  pgd::AssembledProblem base;
  base.grid = model.grid;
  base.n_space = sd.mesh.num_nodes();
  base.fixed_nodes = sd.FixedNodes();
  base.operators = local.operators;
  for (const auto *t : local.operator_terms) base.operator_factors.push_back(t->SampleFactors(model.grid));

  const auto trace_nodes = sd.InterfaceNodes();
  const std::size_t n_problems = trace_nodes.size() + 1;
  std::vector<separated::SeparatedTensor> results(n_problems);
  std::vector<SubproblemStats> stats(n_problems);

  auto run = [&](std::size_t k)
  {
    const auto t0 = Clock::now();
    pgd::AssembledProblem p = base;
    if (k == 0)
    {
      p.loads = local.loads;
      for (const auto *t : local.load_terms) p.load_factors.push_back(t->SampleFactors(model.grid));
    }
    else
    {
      p.lift = pgd::HatLift(p.n_space, trace_nodes[k - 1], model.grid);
    }
    pgd::PgdConfig cfg = opts.pgd;
    cfg.seed = SubproblemSeed(opts.seed, sd.id, k);
    pgd::PgdResult r = pgd::Solve(p, cfg);

    separated::CompressOptions copts;
    copts.seed = SplitMix64(cfg.seed);
    auto c = separated::Compress(r.homogeneous, opts.compress_tol, {}, copts);

    stats[k] = {k,
                r.homogeneous.num_modes(),
                c.tensor.num_modes(),
                c.relative_error,
                c.stagnated,
                r.unconverged_modes,
                r.fixed_point_iterations,
                std::chrono::duration<double>(Clock::now() - t0).count()};
    results[k] = pgd::WithLift(c.tensor, p.lift);
  };

  std::atomic<std::size_t> next{0};
  std::mutex failure_mutex;
  std::exception_ptr failure;
  std::size_t failed_index = 0;
  auto worker = [&]
  {
    for (;;)
    {
      const std::size_t k = next.fetch_add(1);
      if (k >= n_problems) return;
      {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (failure) return;
      }
      try
      {
        run(k);
      }
      catch (...)
      {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure || k < failed_index)
        {
          failure = std::current_exception();
          failed_index = k;
        }
      }
    }
  };

  const std::size_t n_workers = std::clamp<std::size_t>(opts.workers, 1, n_problems);
  if (n_workers == 1)
  {
    worker();
  }
  else
  {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto &t : pool) t.join();
  }
  if (failure)
  {
    try
    {
      std::rethrow_exception(failure);
    }
    catch (const std::exception &e)
    {
      throw SolverError("subdomain '" + sd.id + "', subproblem " + std::to_string(failed_index) +
                        ": " + e.what());
    }
  }

  model.u0 = std::move(results[0]);
  model.uq.assign(std::make_move_iterator(results.begin() + 1),
                  std::make_move_iterator(results.end()));
  model.stats = std::move(stats);
  model.build_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return model;
}

double TraceDefect(const SurrogateModel &model, const std::vector<std::vector<double>> &mus)
{
  const auto trace = model.subdomain.InterfaceNodes();
  const auto &dir = model.subdomain.exterior_dirichlet_nodes;
  double worst = 0.0;
  for (const auto &mu : mus)
  {
    const auto v0 = model.u0.Evaluate(mu);
    for (std::size_t n : trace) worst = std::max(worst, std::abs(v0[n]));
    for (std::size_t n : dir) worst = std::max(worst, std::abs(v0[n]));
    for (std::size_t q = 0; q < model.uq.size(); ++q)
    {
      const auto v = model.uq[q].Evaluate(mu);
      for (std::size_t r = 0; r < trace.size(); ++r)
      {
        worst = std::max(worst, std::abs(v[trace[r]] - (q == r ? 1.0 : 0.0)));
      }
      for (std::size_t n : dir) worst = std::max(worst, std::abs(v[n]));
    }
  }
  return worst;
}

}  // namespace ddpgd::dd
