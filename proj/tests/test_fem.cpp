// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <array>
#include <numbers>

#include "common/error.hpp"
#include "fem/assembly.hpp"
#include "fem/mesh.hpp"
#include "linalg/spd_solver.hpp"
#include "test_support.hpp"

using namespace ddpgd;
using fem::BoundaryTag;
using fem::ScalarField;
using fem::Side;
using fem::SideSpec;
using linalg::Vector;

namespace
{

constexpr double kPi = std::numbers::pi;

// Five-point Gauss-Legendre rule on [0, 1].
constexpr std::array<double, 5> kG5x{0.04691007703066800, 0.23076534494715845, 0.5,
                                     0.76923465505284155, 0.95308992296933200};
constexpr std::array<double, 5> kG5w{0.11846344252809454, 0.23931433524968324, 0.28444444444444444,
                                     0.23931433524968324, 0.11846344252809454};

// Dense stiffness and load by 5x5 Gauss quadrature, the oracle for the 2x2 assembly.
struct DenseOracle
{
  std::vector<double> K;
  Vector b;
};

DenseOracle Integrate(const fem::StructuredMesh &mesh, const ScalarField &a, const ScalarField &f)
{
  const std::size_t n = mesh.num_nodes();
  DenseOracle o{std::vector<double>(n * n, 0.0), Vector(n, 0.0)};
  const double hx = mesh.hx(), hy = mesh.hy();
  for (std::size_t e = 0; e < mesh.num_elements(); ++e)
  {
    const auto nodes = mesh.element(e);
    const auto p0 = mesh.node(nodes[0]);
    for (std::size_t i = 0; i < 5; ++i)
    {
      for (std::size_t j = 0; j < 5; ++j)
      {
        const double xi = kG5x[i], eta = kG5x[j];
        const double w = kG5w[i] * kG5w[j] * hx * hy;
        const double x = p0.x + xi * hx, y = p0.y + eta * hy;
        const std::array<double, 4> N{(1 - xi) * (1 - eta), xi * (1 - eta), xi * eta, (1 - xi) * eta};
        const std::array<std::array<double, 2>, 4> G{{{-(1 - eta) / hx, -(1 - xi) / hy},
                                                      {(1 - eta) / hx, -xi / hy},
                                                      {eta / hx, xi / hy},
                                                      {-eta / hx, (1 - xi) / hy}}};
        for (int p = 0; p < 4; ++p)
        {
          o.b[nodes[p]] += w * f(x, y) * N[p];
          for (int q = 0; q < 4; ++q)
          {
            o.K[nodes[p] * n + nodes[q]] += w * a(x, y) * (G[p][0] * G[q][0] + G[p][1] * G[q][1]);
          }
        }
      }
    }
  }
  return o;
}

std::array<SideSpec, 4> AllDirichlet()
{
  return {};
}

}  // namespace

TEST_CASE("structured mesh counts and tags")
{
  const auto mesh = fem::MeshRectangle({0, 0}, {2, 1}, 0.25);
  CHECK(mesh.nx() == 8);
  CHECK(mesh.ny() == 4);
  CHECK(mesh.num_nodes() == 45);
  CHECK(mesh.num_elements() == 32);
  CHECK(mesh.boundary_edges().size() == 2 * (8 + 4));
  for (const auto &e : mesh.boundary_edges())
  {
    CHECK(e.tag == BoundaryTag::ExteriorDirichlet);
  }
  const auto p = mesh.node(mesh.node_index(3, 2));
  CHECK(p.x == doctest::Approx(0.75));
  CHECK(p.y == doctest::Approx(0.5));
}

TEST_CASE("Q1 element stiffness on the unit square")
{
  const auto mesh = fem::MeshRectangle({0, 0}, {1, 1}, 1.0, AllDirichlet());
  const auto K = fem::AssembleStiffness(mesh, ScalarField::Constant(1.0));
  // Nodes 0:(0,0) 1:(1,0) 2:(0,1) 3:(1,1).
  for (std::size_t i = 0; i < 4; ++i) CHECK(K.At(i, i) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(K.At(0, 3) == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
  CHECK(K.At(1, 2) == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
  CHECK(K.At(0, 1) == doctest::Approx(-1.0 / 6.0).epsilon(1e-14));
  CHECK(K.At(0, 2) == doctest::Approx(-1.0 / 6.0).epsilon(1e-14));
  CHECK(K.IsSymmetric());
}

TEST_CASE("zero coefficient gives the zero matrix")
{
  const auto mesh = fem::MeshRectangle({0, 0}, {1, 1}, 0.25);
  CHECK(fem::AssembleStiffness(mesh, ScalarField::Constant(0.0)).IsZero());
  CHECK(fem::AssembleLoad(mesh, ScalarField::Constant(0.0)) == Vector(mesh.num_nodes(), 0.0));
}

TEST_CASE("stiffness with a = x on a 2x1 mesh matches the dense quadrature oracle")
{
  const auto mesh = fem::MeshRectangle({0, 0}, {2, 1}, 1.0);
  const ScalarField a{[](double x, double) { return x; }, "x"};
  const auto K = fem::AssembleStiffness(mesh, a);
  const auto o = Integrate(mesh, a, ScalarField::Constant(0.0));
  const std::size_t n = mesh.num_nodes();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) CHECK(std::abs(K.At(i, j) - o.K[i * n + j]) <= 1e-12);
}

TEST_CASE("stiffness has zero row sums and is linear in the coefficient")
{
  const auto mesh = fem::MeshRectangle({0, 0}, {1, 2}, 0.25);
  const ScalarField a1{[](double x, double y) { return 1 + x * y; }, "1+xy"};
  const ScalarField a2{[](double x, double y) { return std::exp(x - y); }, "exp"};
  const ScalarField sum{[&](double x, double y) { return a1(x, y) + a2(x, y); }, "sum"};
  const auto K1 = fem::AssembleStiffness(mesh, a1);
  const auto K2 = fem::AssembleStiffness(mesh, a2);
  const auto K = fem::AssembleStiffness(mesh, sum);
  const Vector ones(mesh.num_nodes(), 1.0);
  CHECK(linalg::NormInf(K1 * ones) <= 1e-13);
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i)
    for (std::size_t j = 0; j < mesh.num_nodes(); ++j)
      CHECK(std::abs(K.At(i, j) - K1.At(i, j) - K2.At(i, j)) <= 1e-13);
}

TEST_CASE("load vector")
{
  const auto mesh = fem::MeshRectangle({0, 0}, {1, 1}, 0.1);
  const auto b = fem::AssembleLoad(mesh, ScalarField::Constant(1.0));
  double s = 0.0;
  for (double v : b) s += v;
  CHECK(s == doctest::Approx(1.0).epsilon(1e-13));

  const auto fine = fem::MeshRectangle({0, 0}, {1, 1}, 0.05);
  const ScalarField f{[](double x, double y) { return std::sin(2 * kPi * x) * std::sin(2 * kPi * y); }, "S"};
  const auto bf = fem::AssembleLoad(fine, f);
  const auto o = Integrate(fine, ScalarField::Constant(0.0), f);
  CHECK(test::MaxAbsDiff(bf, o.b) <= 1e-6);
}

TEST_CASE("neumann load on a labelled edge")
{
  std::array<SideSpec, 4> sides{};
  sides[static_cast<int>(Side::Left)] = {BoundaryTag::ExteriorNeumann, "inflow"};
  const auto mesh = fem::MeshRectangle({0, 0}, {1, 1}, 0.5, sides);
  const auto g = fem::AssembleNeumann(mesh, ScalarField::Constant(1.0), "inflow");
  // Left edge nodes (0,0), (0,0.5), (0,1).
  CHECK(g[mesh.node_index(0, 0)] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(g[mesh.node_index(0, 1)] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(g[mesh.node_index(0, 2)] == doctest::Approx(0.25).epsilon(1e-14));
  double s = 0.0;
  for (double v : g) s += v;
  CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(linalg::NormInf(fem::AssembleNeumann(mesh, ScalarField::Constant(0.0), "inflow")) == 0.0);
  CHECK_THROWS_AS(fem::AssembleNeumann(mesh, ScalarField::Constant(1.0), "outflow"), ConfigError);
}

TEST_CASE("dirichlet elimination")
{
  // 1D Laplacian on 5 nodes.
  std::vector<linalg::Triplet> t;
  for (std::size_t i = 0; i < 5; ++i)
  {
    t.push_back({i, i, 2.0});
    if (i > 0) t.push_back({i, i - 1, -1.0});
    if (i < 4) t.push_back({i, i + 1, -1.0});
  }
  const auto A = linalg::SparseMatrix::FromTriplets(5, 5, t);
  const Vector zero(5, 0.0);

  SUBCASE("no fixed nodes is the identity transformation")
  {
    const Vector b{1, 2, 3, 4, 5};
    const auto rs = fem::EliminateDirichlet(A, b, {}, {});
    CHECK(rs.free_nodes.size() == 5);
    CHECK(rs.rhs == b);
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 5; ++j) CHECK(rs.A_free.At(i, j) == A.At(i, j));
  }
  SUBCASE("all nodes fixed gives an empty system")
  {
    const std::vector<std::size_t> all{0, 1, 2, 3, 4};
    const Vector values(5, 1.0);
    const auto rs = fem::EliminateDirichlet(A, zero, all, values);
    CHECK(rs.free_nodes.empty());
    CHECK(rs.rhs.empty());
    CHECK(rs.Expand({}, values) == values);
  }
  SUBCASE("both ends fixed at 1 with zero source gives 1 inside")
  {
    const std::vector<std::size_t> ends{0, 4};
    const Vector values{1.0, 1.0};
    const auto rs = fem::EliminateDirichlet(A, zero, ends, values);
    const Vector inner = linalg::SpdSolve(rs.A_free, rs.rhs);
    const Vector full = rs.Expand(inner, values);
    for (double v : full) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("invalid fixed node lists")
  {
    const std::vector<std::size_t> dup{1, 1};
    const std::vector<std::size_t> out{7};
    CHECK_THROWS_AS(fem::EliminateDirichlet(A, zero, dup, Vector{0.0, 0.0}), ArgumentError);
    CHECK_THROWS_AS(fem::EliminateDirichlet(A, zero, out, Vector{0.0}), ArgumentError);
  }
}

TEST_CASE("reduced system is SPD for positive coefficients")
{
  const auto mesh = fem::MeshRectangle({0, 0}, {1, 1}, 0.1);
  const ScalarField a{[](double x, double y) { return 0.01 + x * x + 5 * y; }, "a"};
  const auto K = fem::AssembleStiffness(mesh, a);
  const auto fixed = mesh.tagged_nodes(BoundaryTag::ExteriorDirichlet);
  const auto rs = fem::EliminateDirichlet(K, Vector(mesh.num_nodes(), 0.0), fixed, Vector(fixed.size(), 0.0));
  CHECK(rs.A_free.IsSymmetric());
  CHECK_NOTHROW(linalg::SpdFactorization{rs.A_free});
}

TEST_CASE("interface nodes")
{
  SUBCASE("bidomain interface at x = 1.05 has 19 nodes")
  {
    std::array<SideSpec, 4> sides{};
    sides[static_cast<int>(Side::Right)] = {BoundaryTag::Interface, "Omega2"};
    const auto mesh = fem::MeshRectangle({0, 0}, {1.05, 1}, 0.05, sides);
    const auto nodes = fem::InterfaceNodes(mesh, "Omega2");
    REQUIRE(nodes.size() == 19);
    for (std::size_t k = 0; k < nodes.size(); ++k)
    {
      const auto p = mesh.node(nodes[k]);
      CHECK(p.x == doctest::Approx(1.05));
      CHECK(p.y == doctest::Approx(0.05 * static_cast<double>(k + 1)));
    }
  }
  SUBCASE("no interface tag gives an empty list")
  {
    CHECK(fem::InterfaceNodes(fem::MeshRectangle({0, 0}, {1, 1}, 0.5)).empty());
  }
  SUBCASE("2x2 unit mesh with the right edge tagged keeps only the middle node")
  {
    std::array<SideSpec, 4> sides{};
    sides[static_cast<int>(Side::Right)] = {BoundaryTag::Interface, "n"};
    const auto mesh = fem::MeshRectangle({0, 0}, {1, 1}, 0.5, sides);
    const auto nodes = fem::InterfaceNodes(mesh);
    REQUIRE(nodes.size() == 1);
    CHECK(nodes[0] == mesh.node_index(2, 1));
  }
}
