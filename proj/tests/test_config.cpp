// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "common/error.hpp"
#include "config/experiment.hpp"
#include "config/expression.hpp"
#include "test_support.hpp"

using namespace ddpgd;
using config::Expression;

namespace
{

double Eval(const std::string &text, std::vector<double> values = {},
            std::vector<std::string> vars = {})
{
  return Expression::Parse(text, vars).Evaluate(values);
}

std::string ParseError(const std::string &yaml)
{
  try
  {
    config::ParseConfig(yaml, "case.yaml");
  }
  catch (const ConfigError &e)
  {
    return e.what();
  }
  return {};
}

const char *kMinimal = R"(name: minimal
geometry:
  domain: {lower: [0, 0], upper: [1, 1]}
  h: 0.1
  subdomains:
    - {id: a, lower: [0, 0], upper: [1, 1]}
parameters:
  - {name: mu, lower: 1, upper: 2, step: 0.5}
data:
  diffusion:
    - space: "1"
      param: {mu: "mu"}
)";

}  // namespace

TEST_CASE("expression precedence and associativity")
{
  CHECK(Eval("1 + 2 * 3") == 7.0);
  CHECK(Eval("(1 + 2) * 3") == 9.0);
  CHECK(Eval("8 / 4 / 2") == 1.0);
  CHECK(Eval("10 - 4 - 3") == 3.0);
  CHECK(Eval("2^3^2") == 512.0);
  CHECK(Eval("-2^2") == -4.0);
  CHECK(Eval("2^-1") == 0.5);
  CHECK(Eval("--3") == 3.0);
  CHECK(Eval("1.5e2 + .5") == 150.5);
}

TEST_CASE("expression functions, constants and variables")
{
  CHECK(Eval("sin(pi/2)") == doctest::Approx(1.0));
  CHECK(Eval("cos(0) + exp(0) + log(1) + sqrt(16) + abs(-2)") == doctest::Approx(8.0));
  CHECK(Eval("tan(0)") == 0.0);
  CHECK(Eval("min(3, -1) + max(3, -1)") == 2.0);
  CHECK(Eval("between(0.5, 0, 1)") == 1.0);
  CHECK(Eval("between(1, 0, 1)") == 1.0);
  CHECK(Eval("between(1.5, 0, 1)") == 0.0);
  CHECK(Eval("pi") == std::numbers::pi);
  const auto e = Expression::Parse("x*y + mu", {"x", "y", "mu"});
  const std::vector<double> v{2.0, 3.0, 0.5};
  CHECK(e.Evaluate(v) == 6.5);
  CHECK(e.Uses(0));
  CHECK(e.Uses(2));
  const auto f = Expression::Parse("x + 1", {"x", "y"});
  CHECK_FALSE(f.Uses(1));
  CHECK(f.text() == "x + 1");
}

TEST_CASE("expression errors name the column")
{
  auto message = [](const std::string &text)
  {
    try
    {
      Expression::Parse(text, {"x"});
    }
    catch (const ConfigError &e)
    {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("1 +").find("column 4") != std::string::npos);
  CHECK(message("x * z").find("unknown name 'z'") != std::string::npos);
  CHECK(message("foo(1)").find("unknown function 'foo'") != std::string::npos);
  CHECK(message("min(1)").find("takes 2 argument(s)") != std::string::npos);
  CHECK(message("(x + 1").find("expected ')'") != std::string::npos);
  CHECK(message("x $ 1").find("column 3") != std::string::npos);
  CHECK(message("1 2").find("column 3") != std::string::npos);
}

TEST_CASE("a minimal config parses with defaults")
{
  const auto cfg = config::ParseConfig(kMinimal);
  CHECK(cfg.name == "minimal");
  CHECK(cfg.geometry.subdomains.size() == 1);
  CHECK(cfg.axes.size() == 1);
  CHECK(cfg.Grid().axis(0).size() == 3);
  CHECK(cfg.AxisNames() == std::vector<std::string>{"mu"});
  CHECK(cfg.tol.enrich == 1e-4);
  CHECK(cfg.tol.compress == 1e-3);
  CHECK(cfg.tol.gmres == 1e-6);
  CHECK(cfg.seed == 1);
  CHECK_FALSE(cfg.exact.has_value());
  CHECK(cfg.queries.empty());
  CHECK(cfg.data.DiffusionAt({{"mu", 2.0}})(0.3, 0.4) == 2.0);
}

TEST_CASE("config errors carry source, line and field")
{
  std::string yaml = kMinimal;
  yaml += "bogus: 1\n";
  auto msg = ParseError(yaml);
  CHECK(msg.find("case.yaml:13") != std::string::npos);
  CHECK(msg.find("unknown key 'bogus'") != std::string::npos);

  msg = ParseError(std::string(kMinimal) + "solver: {enrich_tol: -1}\n");
  CHECK(msg.find("solver.enrich_tol") != std::string::npos);
  CHECK(msg.find("must be positive") != std::string::npos);

  std::string bad_expr = kMinimal;
  bad_expr.replace(bad_expr.find("param: {mu: \"mu\"}"), 18, "param: {mu: \"mu +\"}");
  msg = ParseError(bad_expr);
  CHECK(msg.find("case.yaml:12") != std::string::npos);
  CHECK(msg.find("column") != std::string::npos);

  std::string bad_axis = kMinimal;
  bad_axis.replace(bad_axis.find("param: {mu:"), 11, "param: {nu:");
  CHECK(ParseError(bad_axis).find("unknown parameter 'nu'") != std::string::npos);

  std::string no_diffusion = kMinimal;
  no_diffusion.erase(no_diffusion.find("  diffusion:"));
  no_diffusion += "  source:\n    - space: \"1\"\n";
  CHECK(ParseError(no_diffusion).find("data.diffusion") != std::string::npos);

  CHECK(ParseError("name: [unclosed").find("malformed YAML") != std::string::npos);
  CHECK_THROWS_AS(config::LoadConfig(test::DataDir() / "missing.yaml"), IoError);
  CHECK_THROWS_AS(config::ResolveConfig("no_such_experiment"), ConfigError);
}

TEST_CASE("built-in experiments parse and resolve")
{
  const auto &builtins = config::BuiltinConfigs();
  CHECK(builtins.count("bidomain") == 1);
  CHECK(builtins.count("chain9") == 1);
  for (const auto &[name, text] : builtins)
  {
    const auto cfg = config::ParseConfig(text, name);
    CHECK(cfg.name == name);
    CHECK_FALSE(cfg.queries.empty());
  }
  const auto bi = config::ResolveConfig("bidomain");
  CHECK(bi.geometry.h == 0.05);
  CHECK(bi.Grid().axis(0).size() == 49001);
  CHECK(bi.exact.has_value());
  const auto chain = config::ResolveConfig("chain9");
  CHECK(chain.axes.size() == 9);
  CHECK(chain.queries.size() == 2);
  const auto from_file = config::ResolveConfig((test::DataDir() / "single.yaml").string());
  CHECK(from_file.name == "single");
}

TEST_CASE("parse mu accepts positional and named forms")
{
  const std::vector<std::string> one{"mu"};
  CHECK(config::ParseMu("3", one).at("mu") == 3.0);
  CHECK(config::ParseMu("mu=2.5", one).at("mu") == 2.5);
  const std::vector<std::string> two{"a", "b"};
  const auto p = config::ParseMu("0.1, 0.2", two);
  CHECK(p.at("a") == 0.1);
  CHECK(p.at("b") == 0.2);
  const auto n = config::ParseMu("b=1,a=2", two);
  CHECK(n.at("a") == 2.0);
  CHECK(n.at("b") == 1.0);
  CHECK_THROWS_AS(config::ParseMu("1", two), ArgumentError);
  CHECK_THROWS_AS(config::ParseMu("a=1", two), ArgumentError);
  CHECK_THROWS_AS(config::ParseMu("a=1,c=2", two), ArgumentError);
  CHECK_THROWS_AS(config::ParseMu("x", one), ArgumentError);
  CHECK_THROWS_AS(config::ParseMu("a=1,2", two), ArgumentError);
}

TEST_CASE("manufactured bidomain source equals the operator applied to the exact solution")
{
  const auto cfg = config::ResolveConfig("bidomain");
  REQUIRE(cfg.exact.has_value());
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> ux(0.05, 1.95), uy(0.05, 0.95), umu(1.0, 50.0);
  const double d = 1e-4;
  for (int s = 0; s < 20; ++s)
  {
    const double x = ux(rng), y = uy(rng);
    const dd::ParamValues mu{{"mu", umu(rng)}};
    const auto nu = cfg.data.DiffusionAt(mu);
    auto u = [&](double px, double py) { return (*cfg.exact)(px, py, mu); };
    // Conservative second differences of -div(nu grad u).
    const double c = u(x, y);
    const double fx = nu(x + d / 2, y) * (u(x + d, y) - c) - nu(x - d / 2, y) * (c - u(x - d, y));
    const double fy = nu(x, y + d / 2) * (u(x, y + d) - c) - nu(x, y - d / 2) * (c - u(x, y - d));
    const double fd = -(fx + fy) / (d * d);
    const double src = cfg.data.SourceAt(mu)(x, y);
    CHECK(std::abs(fd - src) <= 1e-4 * std::max(1.0, std::abs(src)));
  }
}
