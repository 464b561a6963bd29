// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "common/error.hpp"
#include "config/experiment.hpp"
#include "reference/reference.hpp"
#include "test_support.hpp"

using namespace ddpgd;
using linalg::Vector;

namespace
{

double ExactError(const config::ExperimentConfig &cfg, double mu)
{
  const dd::ParamValues m{{"mu", mu}};
  const auto field = reference::FullOrderSolve(cfg.Global(), m);
  const auto mesh = dd::GlobalMesh(cfg.geometry);
  return reference::RelL2Error(mesh, field, [&](double x, double y) { return (*cfg.exact)(x, y, m); });
}

// Bidomain geometry with overlap 2 k h around x = 1.
config::ExperimentConfig WithOverlap(int k)
{
  auto cfg = config::ResolveConfig("bidomain");
  const double h = cfg.geometry.h;
  cfg.geometry.subdomains[0].upper.x = 1.0 + k * h;
  cfg.geometry.subdomains[1].lower.x = 1.0 - k * h;
  return cfg;
}

}  // namespace

TEST_CASE("zero data gives a zero full-order field")
{
  const auto cfg = test::LoadData("zero_source.yaml");
  const auto u = reference::FullOrderSolve(cfg.Global(), {{"mu", 1.5}});
  CHECK(u.size() == dd::GlobalMesh(cfg.geometry).num_nodes());
  CHECK(linalg::NormInf(u) == 0.0);
}

TEST_CASE("full-order errors on the bidomain test match the published values")
{
  const auto cfg = config::ResolveConfig("bidomain");
  CHECK(ExactError(cfg, 3.0) == doctest::Approx(9.07e-3).epsilon(0.05));
  CHECK(ExactError(cfg, 30.0) == doctest::Approx(3.27e-3).epsilon(0.05));
}

TEST_CASE("halving h reduces the L2 error about fourfold")
{
  const auto coarse = config::ResolveConfig("bidomain");
  auto fine = coarse;
  fine.geometry.h = coarse.geometry.h / 2;
  for (double mu : {3.0, 30.0})
  {
    const double ratio = ExactError(coarse, mu) / ExactError(fine, mu);
    CHECK(ratio >= 3.0);
    CHECK(ratio <= 5.0);
  }
}

TEST_CASE("alternating Schwarz on zero data stops after one sweep")
{
  const auto cfg = test::LoadData("zero_source.yaml");
  const auto sds = dd::Decompose(cfg.geometry);
  const auto r = reference::AlternatingSchwarz(sds, cfg.data, {{"mu", 1.5}}, 1e-8, 50);
  CHECK(r.converged);
  CHECK(r.iterations == 1);
  for (const auto &f : r.fields) CHECK(linalg::NormInf(f) == 0.0);
}

TEST_CASE("alternating Schwarz agrees with the full-order solve")
{
  const auto cfg = config::ResolveConfig("bidomain");
  const dd::ParamValues mu{{"mu", 3.0}};
  const auto sds = dd::Decompose(cfg.geometry);
  const auto r = reference::AlternatingSchwarz(sds, cfg.data, mu, 1e-6, 2000);
  REQUIRE(r.converged);
  CHECK(r.history.size() == r.iterations);
  CHECK(r.history.back() < 1e-6);
  const auto global = dd::GlobalMesh(cfg.geometry);
  const auto u = reference::FullOrderSolve(cfg.Global(), mu);
  for (std::size_t i = 0; i < sds.size(); ++i)
  {
    const Vector restricted = reference::RestrictToMesh(global, u, sds[i].mesh);
    CHECK(test::MaxAbsDiff(r.fields[i], restricted) <= 1e-5);
  }
}

TEST_CASE("exact initial traces converge within two sweeps")
{
  const auto cfg = config::ResolveConfig("bidomain");
  const dd::ParamValues mu{{"mu", 30.0}};
  const auto sds = dd::Decompose(cfg.geometry);
  const auto global = dd::GlobalMesh(cfg.geometry);
  const auto u = reference::FullOrderSolve(cfg.Global(), mu);
  std::vector<Vector> traces;
  for (const auto &sd : sds)
  {
    const Vector local = reference::RestrictToMesh(global, u, sd.mesh);
    Vector t;
    for (std::size_t n : sd.InterfaceNodes()) t.push_back(local[n]);
    traces.push_back(std::move(t));
  }
  const auto r = reference::AlternatingSchwarz(sds, cfg.data, mu, 1e-8, 50, &traces);
  CHECK(r.converged);
  CHECK(r.iterations <= 2);
}

TEST_CASE("Schwarz iteration count does not grow with the overlap")
{
  std::size_t previous = std::numeric_limits<std::size_t>::max();
  for (int k : {1, 2, 3})
  {
    const auto cfg = WithOverlap(k);
    const auto sds = dd::Decompose(cfg.geometry);
    const auto r = reference::AlternatingSchwarz(sds, cfg.data, {{"mu", 3.0}}, 1e-8, 2000);
    REQUIRE(r.converged);
    CHECK(r.iterations <= previous);
    previous = r.iterations;
  }
}

TEST_CASE("Schwarz reports iteration exhaustion")
{
  const auto cfg = config::ResolveConfig("bidomain");
  const auto sds = dd::Decompose(cfg.geometry);
  const auto r = reference::AlternatingSchwarz(sds, cfg.data, {{"mu", 3.0}}, 1e-12, 3);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 3);
}

TEST_CASE("local solver reuses one factorization for several traces")
{
  const auto &c = test::Coarse();
  const auto &sd = c.subdomains[0];
  const dd::ParamValues mu{{"mu", 7.0}};
  const auto trace = sd.InterfaceNodes();
  const reference::LocalSolver solver(sd.mesh, c.cfg.data, mu, trace);
  for (double s : {0.0, 1.0, -2.5})
  {
    const Vector values(trace.size(), s);
    const Vector a = solver.Solve(values);
    const Vector b = reference::SolveLocal(sd.mesh, c.cfg.data, mu, trace, values);
    CHECK(test::MaxAbsDiff(a, b) <= 1e-12);
    for (std::size_t q = 0; q < trace.size(); ++q) CHECK(a[trace[q]] == s);
  }
  CHECK_THROWS_AS(solver.Solve(Vector(trace.size() + 1, 0.0)), ArgumentError);
}

TEST_CASE("relative L2 error of interpolants")
{
  const auto mesh = fem::MeshRectangle({0, 0}, {2, 1}, 0.25);
  const auto bilinear = [](double x, double y) { return 1.0 + x + 2.0 * y + 3.0 * x * y; };
  Vector u(mesh.num_nodes());
  for (std::size_t n = 0; n < u.size(); ++n) u[n] = bilinear(mesh.node(n).x, mesh.node(n).y);
  CHECK(reference::RelL2Error(mesh, u, bilinear) <= 1e-14);
  Vector twice = u;
  linalg::Scale(2.0, twice);
  CHECK(reference::RelL2Error(mesh, twice, bilinear) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("relative l-infinity error with one perturbed node")
{
  Vector b{1.0, -4.0, 2.0, 0.5};
  Vector a = b;
  a[2] += 0.3;
  CHECK(reference::RelLinfError(a, b) == doctest::Approx(0.3 / 4.0).epsilon(1e-14));
  CHECK(reference::RelLinfError(b, b) == 0.0);
}
