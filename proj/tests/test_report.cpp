// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <charconv>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "common/error.hpp"
#include "report/report.hpp"
#include "test_support.hpp"

using namespace ddpgd;

TEST_CASE("formatted doubles parse back to the same value")
{
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> values{0.0, 1.0, -2.5, 1e-300, 3.0e200, std::numeric_limits<double>::denorm_min(),
                             0.1 + 0.2};
  for (int k = 0; k < 200; ++k) values.push_back(u(rng) * std::pow(10.0, k % 40 - 20));
  for (double v : values)
  {
    const std::string s = report::FormatDouble(v);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(back == v);
  }
  CHECK(report::FormatDouble(0.5) == "0.5");
}

TEST_CASE("field CSV lists every node")
{
  const auto mesh = fem::MeshRectangle({0, 0}, {1, 1}, 0.5);
  std::vector<double> field(mesh.num_nodes());
  for (std::size_t n = 0; n < field.size(); ++n) field[n] = 0.25 * static_cast<double>(n);
  std::ostringstream os;
  report::WriteFieldCsv(os, mesh, field);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "x,y,value");
  std::size_t rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == mesh.num_nodes());
  CHECK(os.str().find("\n0.5,0,0.25\n") != std::string::npos);
  field.pop_back();
  std::ostringstream bad;
  CHECK_THROWS_AS(report::WriteFieldCsv(bad, mesh, field), ArgumentError);
}

TEST_CASE("json files round-trip and bad files are reported")
{
  const auto dir = test::ScratchDir("report_json");
  const nlohmann::json j{{"kind", "online"}, {"mu", {{"mu", 3.0}}}, {"values", {1, 2, 3}}};
  report::WriteJson(dir / "a.json", j);
  CHECK(report::ReadJson(dir / "a.json") == j);
  {
    std::ofstream os(dir / "bad.json");
    os << "{not json";
  }
  CHECK_THROWS_AS(report::ReadJson(dir / "bad.json"), FormatError);
  CHECK_THROWS_AS(report::ReadJson(dir / "missing.json"), IoError);
}

TEST_CASE("mu labels")
{
  CHECK(report::MuLabel(nlohmann::json{{"mu", 3.0}}) == "mu=3");
  CHECK(report::MuLabel(nlohmann::json{{"mu1", 0.1}, {"mu2", 0.25}}) == "mu1=0.1,mu2=0.25");
  CHECK(report::MuLabel(nlohmann::json::array()).empty());
}

TEST_CASE("comparison table leaves missing fields blank")
{
  const nlohmann::json online{{"kind", "online"},
                              {"mu", {{"mu", 3.0}}},
                              {"gmres", {{"iterations", 9}}},
                              {"timings", {{"online_seconds", 0.0016}}},
                              {"errors", {{"rel_l2_vs_exact", 9.0674e-3}}},
                              {"overlap_mismatch", 4.6e-5}};
  const nlohmann::json ref{{"kind", "reference"}, {"mu", {{"mu", 30.0}}}};
  const auto t = report::CompareTable({{"a.json", online}, {"b.json", ref}});
  REQUIRE(t.rows.size() == 2);
  REQUIRE(t.rows[0].size() == t.columns.size());
  CHECK(t.rows[0][0] == "a.json");
  CHECK(t.rows[0][2] == "mu=3");
  CHECK(t.rows[0][3] == "9");
  CHECK(t.rows[0][5] == "9.067e-03");
  CHECK(t.rows[1][3].empty());
  CHECK(t.rows[1][5].empty());

  const std::string md = report::ToMarkdown(t);
  std::istringstream is(md);
  std::string header, rule, first;
  std::getline(is, header);
  std::getline(is, rule);
  std::getline(is, first);
  CHECK(header.rfind("| report | kind | mu |", 0) == 0);
  CHECK(rule.find("| --- |") != std::string::npos);
  CHECK(first.rfind("| a.json | online | mu=3 | 9 |", 0) == 0);

  const std::string csv = report::ToCsv(t);
  CHECK(csv.rfind("report,kind,mu,gmres_iterations", 0) == 0);
  CHECK(csv.find("b.json,reference,mu=30,,") != std::string::npos);
}

TEST_CASE("csv cells with separators are quoted")
{
  report::Table t{{"a", "b"}, {{"x,y", "say \"hi\""}}};
  CHECK(report::ToCsv(t) == "a,b\n\"x,y\",\"say \"\"hi\"\"\"\n");
}
