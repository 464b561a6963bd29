// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "common/error.hpp"
#include "dd/model_io.hpp"
#include "dd/online.hpp"
#include "reference/reference.hpp"
#include "test_support.hpp"

using namespace ddpgd;
using linalg::Vector;

namespace
{

// Random grid points of a model as tuples in grid order.
std::vector<std::vector<double>> GridSamples(const separated::ParamGrid &grid, std::size_t n,
                                             std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> out;
  for (std::size_t s = 0; s < n; ++s)
  {
    std::vector<double> mu;
    for (const auto &axis : grid.axes())
    {
      std::uniform_int_distribution<std::size_t> pick(0, axis.size() - 1);
      mu.push_back(axis.points()[pick(rng)]);
    }
    out.push_back(std::move(mu));
  }
  return out;
}

dd::ParamValues Named(const separated::ParamGrid &grid, const std::vector<double> &mu)
{
  dd::ParamValues out;
  for (std::size_t d = 0; d < grid.dims(); ++d) out[grid.axis(d).name()] = mu[d];
  return out;
}

std::string Bytes(const dd::SurrogateModel &m)
{
  std::ostringstream os;
  dd::WriteModel(os, m);
  return os.str();
}

}  // namespace

TEST_CASE("zero source gives a vanishing u0")
{
  const auto cfg = test::LoadData("zero_source.yaml");
  const auto sds = dd::Decompose(cfg.geometry);
  const auto m = dd::BuildSurrogate(sds[0], cfg.Grid(), cfg.data, cfg.Offline());
  CHECK(m.u0.num_modes() == 0);
  for (const auto &mu : GridSamples(m.grid, 5, 1))
  {
    const Vector v = m.u0.Evaluate(mu);
    CHECK(linalg::NormInf(v) == 0.0);
  }
  CHECK(m.uq.size() == sds[0].interface_size());
}

TEST_CASE("surrogates satisfy the trace property at random grid points")
{
  const auto &c = test::Coarse();
  for (const auto &m : c.models)
  {
    CHECK(m->uq.size() == m->subdomain.interface_size());
    const auto mus = GridSamples(m->grid, 10, 2);
    CHECK(dd::TraceDefect(*m, mus) <= 10 * c.cfg.tol.enrich);
  }
}

TEST_CASE("superposition of surrogate solutions matches a direct local solve")
{
  const auto &c = test::Coarse();
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const auto &m : c.models)
  {
    const auto trace = m->subdomain.InterfaceNodes();
    for (const auto &mu : GridSamples(m->grid, 5, 3))
    {
      Vector lambda(trace.size());
      for (double &v : lambda) v = u(rng);
      Vector field = m->u0.Evaluate(mu);
      for (std::size_t q = 0; q < trace.size(); ++q) linalg::Axpy(lambda[q], m->uq[q].Evaluate(mu), field);
      const Vector oracle =
        reference::SolveLocal(m->subdomain.mesh, c.cfg.data, Named(m->grid, mu), trace, lambda);
      Vector d = field;
      linalg::Axpy(-1.0, oracle, d);
      CHECK(linalg::Norm2(d) <= 10 * c.cfg.tol.enrich * linalg::Norm2(oracle));
    }
  }
}

TEST_CASE("offline builds do not depend on the worker count")
{
  const auto &c = test::Coarse();
  auto opts = c.cfg.Offline();
  opts.workers = 4;
  const auto parallel = dd::BuildSurrogate(c.subdomains[1], c.cfg.Grid(), c.cfg.data, opts);
  opts.workers = 1;
  const auto serial = dd::BuildSurrogate(c.subdomains[1], c.cfg.Grid(), c.cfg.data, opts);
  CHECK(Bytes(parallel) == Bytes(serial));
  CHECK(Bytes(serial) == Bytes(*c.models[1]));
}

TEST_CASE("save and load round-trip is bit exact")
{
  const auto &c = test::Coarse();
  const auto dir = test::ScratchDir("offline_roundtrip");
  const auto &m = *c.models[0];
  dd::SaveModel(m, dir / "m.ddpgd");
  const auto loaded = dd::LoadModel(dir / "m.ddpgd");
  CHECK(Bytes(loaded) == Bytes(m));
  CHECK(loaded.ModesAfter() == m.ModesAfter());
  CHECK(loaded.ModesBefore() == m.ModesBefore());
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(1.0, 50.0);
  for (int s = 0; s < 5; ++s)
  {
    const std::vector<double> mu{u(rng)};
    CHECK(loaded.u0.Evaluate(mu) == m.u0.Evaluate(mu));
    for (std::size_t q = 0; q < m.uq.size(); q += 6) CHECK(loaded.uq[q].Evaluate(mu) == m.uq[q].Evaluate(mu));
  }
}

TEST_CASE("damaged model files are rejected")
{
  const auto &c = test::Coarse();
  const auto &m = *c.models[0];
  const std::string bytes = Bytes(m);

  SUBCASE("truncated payload")
  {
    for (std::size_t cut : {std::size_t{4}, std::size_t{20}, bytes.size() / 2, bytes.size() - 1})
    {
      std::istringstream is(bytes.substr(0, cut));
      CHECK_THROWS_AS(dd::ReadModel(is), FormatError);
    }
  }
  SUBCASE("version mismatch")
  {
    std::string b = bytes;
    b[8] = static_cast<char>(dd::kModelFormatVersion + 1);
    std::istringstream is(b);
    CHECK_THROWS_AS(dd::ReadModel(is), FormatError);
  }
  SUBCASE("bad magic")
  {
    std::string b = bytes;
    b[0] = 'X';
    std::istringstream is(b);
    CHECK_THROWS_AS(dd::ReadModel(is), FormatError);
  }
  SUBCASE("broken trace property")
  {
    auto broken = m;
    const std::size_t node = broken.subdomain.InterfaceNodes()[3];
    separated::Mode bump{Vector(broken.uq[0].n_space(), 0.0), {}};
    bump.spatial[node] = 0.5;
    for (const auto &axis : broken.grid.axes()) bump.parametric.push_back(Vector(axis.size(), 1.0));
    broken.uq[0].AddMode(bump);
    const auto dir = test::ScratchDir("offline_broken");
    dd::SaveModel(broken, dir / "broken.ddpgd");
    CHECK_THROWS_AS(dd::LoadModel(dir / "broken.ddpgd"), FormatError);
  }
  SUBCASE("missing file")
  {
    CHECK_THROWS_AS(dd::LoadModel(test::ScratchDir("offline_missing") / "none.ddpgd"), IoError);
  }
}

TEST_CASE("a model used with a different grid is rejected")
{
  const auto &c = test::Coarse();
  const separated::ParamGrid other{{separated::ParamAxis("mu", 1.0, 50.0, 0.02)}};
  CHECK_THROWS_AS(dd::CheckCompatible(*c.models[0], c.subdomains[0], other), ConfigError);
  CHECK_THROWS_AS(dd::CheckCompatible(*c.models[0], c.subdomains[1], c.cfg.Grid()), ConfigError);
  CHECK_NOTHROW(dd::CheckCompatible(*c.models[0], c.subdomains[0], c.cfg.Grid()));
}

TEST_CASE("solver failures name the subproblem")
{
  auto cfg = test::LoadData("zero_source.yaml");
  for (auto &t : cfg.data.diffusion) t.spatial = fem::ScalarField::Constant(-1.0);
  const auto sds = dd::Decompose(cfg.geometry);
  try
  {
    dd::BuildSurrogate(sds[0], cfg.Grid(), cfg.data, cfg.Offline());
    FAIL("expected a SolverError");
  }
  catch (const SolverError &e)
  {
    const std::string what = e.what();
    CHECK(what.find("subdomain 'left'") != std::string::npos);
    // The source problem has no data and returns before any solve; trace problem 1 fails first.
    CHECK(what.find("subproblem 1:") != std::string::npos);
  }
}

TEST_CASE("nonpositive compression tolerance is a config error")
{
  const auto &c = test::Coarse();
  auto opts = c.cfg.Offline();
  opts.compress_tol = 0.0;
  CHECK_THROWS_AS(dd::BuildSurrogate(c.subdomains[0], c.cfg.Grid(), c.cfg.data, opts), ConfigError);
}
