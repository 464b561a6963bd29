// SPDX-License-Identifier: Apache-2.0
//
// Acceptance run: one PASS/FAIL line per criterion. Criteria named with --known-fail still
// print their real verdict but do not change the exit code.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "common/counters.hpp"
#include "config/experiment.hpp"
#include "dd/model_io.hpp"
#include "dd/online.hpp"
#include "reference/reference.hpp"

using namespace ddpgd;
using linalg::Vector;
using Clock = std::chrono::steady_clock;
using ModelPtr = std::shared_ptr<const dd::SurrogateModel>;

namespace
{

struct Verdict
{
  int id;
  bool pass;
  bool soft;
  std::string title;
  std::string detail;
};

std::vector<Verdict> g_verdicts;

void Report(int id, bool pass, const std::string &title, const std::string &detail, bool soft = false)
{
  g_verdicts.push_back({id, pass, soft, title, detail});
  std::printf("%s %2d %s%s: %s\n", pass ? "PASS" : "FAIL", id, title.c_str(), soft ? " (soft)" : "",
              detail.c_str());
  std::fflush(stdout);
}

std::string Fmt(const char *f, auto... args)
{
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

double Seconds(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Built
{
  config::ExperimentConfig cfg;
  std::vector<dd::Subdomain> subdomains;
  std::vector<ModelPtr> models;
  double offline_seconds = 0.0;
};

Built Build(const std::string &name)
{
  Built b{config::ResolveConfig(name), {}, {}, 0.0};
  b.subdomains = dd::Decompose(b.cfg.geometry);
  const auto t0 = Clock::now();
  for (const auto &sd : b.subdomains)
  {
    b.models.push_back(std::make_shared<dd::SurrogateModel>(
      dd::BuildSurrogate(sd, b.cfg.Grid(), b.cfg.data, b.cfg.Offline())));
  }
  b.offline_seconds = Seconds(t0);
  return b;
}

struct OnlineRun
{
  linalg::GmresResult gmres;
  dd::GlobalSolution solution;
  double seconds = 0.0;
  counters::Snapshot work;
};

OnlineRun Online(const Built &b, const dd::ParamValues &mu)
{
  const auto before = counters::Read();
  const auto t0 = Clock::now();
  const dd::SchwarzProblem sp(b.models, mu, b.cfg.Gmres());
  auto r = sp.SolveInterface();
  auto g = sp.Reconstruct(r.x);
  const double s = Seconds(t0);
  return {std::move(r), std::move(g), s, counters::Delta(before, counters::Read())};
}

double ExactL2(const Built &b, const fem::StructuredMesh &mesh, const Vector &field, const dd::ParamValues &mu)
{
  return reference::RelL2Error(mesh, field, [&](double x, double y) { return (*b.cfg.exact)(x, y, mu); });
}

double FemL2(const config::ExperimentConfig &cfg, const dd::ParamValues &mu)
{
  const auto u = reference::FullOrderSolve(cfg.Global(), mu);
  return reference::RelL2Error(dd::GlobalMesh(cfg.geometry), u,
                               [&](double x, double y) { return (*cfg.exact)(x, y, mu); });
}

std::string Bytes(const dd::SurrogateModel &m)
{
  std::ostringstream os;
  dd::WriteModel(os, m);
  return os.str();
}

bool Within(double v, double target, double rel)
{
  return std::abs(v - target) <= rel * target;
}

void Bidomain(std::mt19937_64 &rng)
{
  std::printf("# bidomain: offline build\n");
  const Built b = Build("bidomain");
  std::printf("# bidomain: offline %.2f s, modes %zu/%zu (Omega1 before/after), %zu/%zu (Omega2)\n",
              b.offline_seconds, b.models[0]->ModesBefore(), b.models[0]->ModesAfter(),
              b.models[1]->ModesBefore(), b.models[1]->ModesAfter());

  const dd::ParamValues mu3{{"mu", 3.0}}, mu30{{"mu", 30.0}};
  const OnlineRun r3 = Online(b, mu3), r30 = Online(b, mu30);
  const double pgd3 = ExactL2(b, r3.solution.mesh, r3.solution.field, mu3);
  const double pgd30 = ExactL2(b, r30.solution.mesh, r30.solution.field, mu30);
  const double fem3 = FemL2(b.cfg, mu3), fem30 = FemL2(b.cfg, mu30);
  const double online_max = std::max(r3.seconds, r30.seconds);

  // 1. Table 1 reproduction.
  {
    const bool ok = Within(pgd3, 9.08e-3, 0.10) && Within(pgd30, 3.27e-3, 0.10) &&
                    Within(fem3, 9.07e-3, 0.05) && Within(fem30, 3.27e-3, 0.05) &&
                    b.offline_seconds < 300.0 && online_max < 1.0;
    Report(1, ok, "Table 1 errors",
           Fmt("DD-PGD L2 %.4e (9.08e-3 +-10%%) / %.4e (3.27e-3 +-10%%); FEM %.4e (9.07e-3 +-5%%) / "
               "%.4e (3.27e-3 +-5%%); offline %.1f s (< 300), online %.4f s (< 1)",
               pgd3, pgd30, fem3, fem30, b.offline_seconds, online_max));
  }

  // 2. GMRES iterations and monotone history at mu = 3.
  {
    const auto &h = r3.gmres.residual_history;
    bool monotone = true;
    for (std::size_t k = 1; k < h.size(); ++k) monotone = monotone && h[k] <= h[k - 1];
    Report(2, r3.gmres.converged() && r3.gmres.iterations <= 15 && monotone, "GMRES iterations at mu=3",
           Fmt("%zu iterations (<= 15, reference 9), history monotone: %s", r3.gmres.iterations,
               monotone ? "yes" : "no"));
  }

  // 3. DD-PGD vs FEM accuracy.
  {
    const double d3 = std::abs(pgd3 - fem3), d30 = std::abs(pgd30 - fem30);
    Report(3, d3 <= 2e-4 && d30 <= 2e-4, "DD-PGD vs FEM error gap",
           Fmt("|err_PGD - err_FEM| = %.2e (mu=3), %.2e (mu=30), bound 2e-4", d3, d30));
  }

  // 4. Superposition on Omega1 at random (mu, Lambda).
  {
    const auto &m = *b.models[0];
    const auto trace = m.subdomain.InterfaceNodes();
    std::uniform_real_distribution<double> umu(1.0, 50.0), ul(-1.0, 1.0);
    double worst = 0.0;
    for (int s = 0; s < 5; ++s)
    {
      const std::vector<double> mu{umu(rng)};
      Vector lambda(trace.size());
      for (double &v : lambda) v = ul(rng);
      Vector field = m.u0.Evaluate(mu);
      for (std::size_t q = 0; q < trace.size(); ++q) linalg::Axpy(lambda[q], m.uq[q].Evaluate(mu), field);
      const Vector oracle = reference::SolveLocal(m.subdomain.mesh, b.cfg.data, {{"mu", mu[0]}}, trace, lambda);
      Vector d = field;
      linalg::Axpy(-1.0, oracle, d);
      worst = std::max(worst, linalg::Norm2(d) / linalg::Norm2(oracle));
    }
    Report(4, worst <= 1e-3, "superposition on Omega1", Fmt("worst relative l2 %.2e over 5 (mu, Lambda), bound 1e-3", worst));
  }

  // 5. Interface solution vs classical alternating Schwarz.
  {
    double worst = 0.0;
    std::string detail;
    for (const auto *mu : {&mu3, &mu30})
    {
      const auto &run = mu == &mu3 ? r3 : r30;
      const dd::SchwarzProblem sp(b.models, *mu, b.cfg.Gmres());
      const auto sw = reference::AlternatingSchwarz(b.subdomains, b.cfg.data, *mu, 1e-8, 5000);
      double d = sw.converged ? 0.0 : INFINITY;
      for (std::size_t i = 0; i < b.subdomains.size(); ++i)
        for (std::size_t k = 0; k < sw.traces[i].size(); ++k)
          d = std::max(d, std::abs(sw.traces[i][k] - run.gmres.x[sp.offset(i) + k]));
      worst = std::max(worst, d);
      detail += Fmt("%smu=%g: %.2e (%zu Schwarz sweeps)", detail.empty() ? "" : ", ", mu->at("mu"), d,
                    sw.iterations);
    }
    Report(5, worst <= 1e-4, "Lambda* vs alternating Schwarz", detail + ", bound 1e-4");
  }

  // 6. Exact linearity of the surrogate operator.
  {
    const dd::SchwarzProblem sp(b.models, mu3, b.cfg.Gmres());
    std::uniform_real_distribution<double> ul(-1e3, 1e3), uc(-10.0, 10.0);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t)
    {
      const std::size_t j = static_cast<std::size_t>(t) % sp.num_subdomains();
      const std::size_t n = sp.cache(j).uq.size();
      Vector a(n), c(n);
      for (double &v : a) v = ul(rng);
      for (double &v : c) v = ul(rng);
      const double alpha = uc(rng), beta = uc(rng);
      Vector combo = a;
      linalg::Scale(alpha, combo);
      linalg::Axpy(beta, c, combo);
      const Vector lhs = sp.OperatorApply(j, combo), fa = sp.OperatorApply(j, a), fc = sp.OperatorApply(j, c);
      const double scale = std::abs(alpha) * linalg::NormInf(fa) + std::abs(beta) * linalg::NormInf(fc);
      for (std::size_t r = 0; r < lhs.size(); ++r)
        worst = std::max(worst, std::abs(lhs[r] - (alpha * fa[r] + beta * fc[r])) / scale);
    }
    Report(6, worst <= 1e-13, "online linearity",
           Fmt("worst relative deviation %.2e over 100 pairs, |Lambda| <= 1e3, bound 1e-13", worst));
  }

  // 8. Convergence order of the full-order FEM.
  {
    auto fine = b.cfg;
    fine.geometry.h = b.cfg.geometry.h / 2;
    const double q3 = fem3 / FemL2(fine, mu3), q30 = fem30 / FemL2(fine, mu30);
    Report(8, q3 >= 3 && q3 <= 5 && q30 >= 3 && q30 <= 5, "FEM h-halving ratio",
           Fmt("%.3f (mu=3), %.3f (mu=30), expected in [3, 5]", q3, q30));
  }

  // 9. Mode counts against the published totals.
  {
    const std::size_t m1 = b.models[0]->ModesAfter(), m2 = b.models[1]->ModesAfter();
    const bool ok = m1 >= 34 && m1 <= 102 && m2 >= 28 && m2 <= 84;
    std::string breakdown;
    for (const auto &m : b.models)
    {
      breakdown += " " + m->subdomain.id + ":";
      for (const auto &s : m->stats) breakdown += Fmt(" %zu->%zu", s.modes_before, s.modes_after);
      std::printf("# %s per subproblem (before->after):%s\n", m->subdomain.id.c_str(),
                  breakdown.substr(breakdown.rfind(':') + 1).c_str());
    }
    Report(9, ok, "mode counts",
           Fmt("Omega1 %zu (68 +-50%%, %zu before compression), Omega2 %zu (56 +-50%%, %zu before)", m1,
               b.models[0]->ModesBefore(), m2, b.models[1]->ModesBefore()),
           true);
  }

  // 10. Determinism and round trip.
  {
    bool same = true;
    for (std::size_t i = 0; i < b.subdomains.size(); ++i)
    {
      auto opts = b.cfg.Offline();
      opts.workers = 4;
      const auto again = dd::BuildSurrogate(b.subdomains[i], b.cfg.Grid(), b.cfg.data, opts);
      same = same && Bytes(again) == Bytes(*b.models[i]);
    }
    const auto dir = std::filesystem::temp_directory_path() / ("ddpgd_acceptance_" + std::to_string(rng()));
    std::filesystem::create_directories(dir);
    bool round_trip = true;
    for (const auto &m : b.models)
    {
      const auto path = dir / (m->subdomain.id + ".ddpgd");
      dd::SaveModel(*m, path);
      const auto loaded = dd::LoadModel(path);
      round_trip = round_trip && Bytes(loaded) == Bytes(*m);
      const std::vector<double> mu{17.123};
      round_trip = round_trip && loaded.u0.Evaluate(mu) == m->u0.Evaluate(mu);
    }
    std::filesystem::remove_all(dir);
    Report(10, same && round_trip, "determinism and round trip",
           Fmt("rebuild with 4 workers byte-identical: %s; save/load bit-exact: %s", same ? "yes" : "no",
               round_trip ? "yes" : "no"));
  }
}

void Chain9()
{
  std::printf("# chain9: offline build\n");
  const Built b = Build("chain9");
  std::size_t modes = 0;
  for (const auto &m : b.models) modes += m->ModesAfter();
  std::printf("# chain9: offline %.2f s, %zu modes after compression\n", b.offline_seconds, modes);
  bool ok = true;
  std::string detail;
  const char *published[] = {"1.8e-3, 93 it", "3.4e-4, 57 it"};
  for (std::size_t k = 0; k < b.cfg.queries.size(); ++k)
  {
    const auto &mu = b.cfg.queries[k];
    const OnlineRun r = Online(b, mu);
    const auto fem = reference::FullOrderSolve(b.cfg.Global(), mu);
    const double linf = reference::RelLinfError(r.solution.field, fem);
    ok = ok && linf <= 5e-3 && r.gmres.converged() && r.work.assemblies == 0 && r.work.factorizations == 0;
    detail += Fmt("%sset %zu: l_inf %.2e, %zu GMRES it, %llu assemblies, online %.3f s [reference %s]",
                  detail.empty() ? "" : "; ", k + 1, linf, r.gmres.iterations,
                  static_cast<unsigned long long>(r.work.assemblies), r.seconds, published[std::min<std::size_t>(k, 1)]);
  }
  Report(7, ok, "chain9 vs FEM", detail + "; bound 5e-3, zero online assemblies");
}

}  // namespace

int main(int argc, char **argv)
{
  std::set<int> known_fail;
  for (int i = 1; i < argc; ++i)
  {
    const std::string a = argv[i];
    if (a == "--known-fail" && i + 1 < argc)
    {
      known_fail.insert(std::atoi(argv[++i]));
    }
    else
    {
      std::fprintf(stderr, "usage: %s [--known-fail N]...\n", argv[0]);
      return 2;
    }
  }
  std::mt19937_64 rng(20240601);
  try
  {
    Bidomain(rng);
    Chain9();
  }
  catch (const std::exception &e)
  {
    std::printf("FAIL acceptance run aborted: %s\n", e.what());
    return 1;
  }

  std::sort(g_verdicts.begin(), g_verdicts.end(), [](const Verdict &a, const Verdict &b) { return a.id < b.id; });
  int gating_failures = 0;
  std::printf("# summary\n");
  for (const auto &v : g_verdicts)
  {
    const bool excused = known_fail.count(v.id) > 0;
    std::printf("%s %2d %s%s\n", v.pass ? "PASS" : "FAIL", v.id, v.title.c_str(),
                v.soft ? " (soft, not gated)" : (!v.pass && excused ? " (known failure, see README)" : ""));
    if (!v.pass && !v.soft && !excused) ++gating_failures;
  }
  return gating_failures == 0 ? 0 : 1;
}
