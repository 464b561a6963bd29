// SPDX-License-Identifier: Apache-2.0

#include "report/report.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "common/error.hpp"

namespace ddpgd::report
{

std::string FormatDouble(double v)
{
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc())
  {
    throw Error(ErrorKind::Internal, "number formatting failed");
  }
  return std::string(buf, ptr);
}

void WriteFieldCsv(std::ostream &os, const fem::StructuredMesh &mesh, std::span<const double> field)
{
  if (field.size() != mesh.num_nodes())
  {
    throw ArgumentError("field length does not match the mesh");
  }
  os << "x,y,value\n";
  for (std::size_t n = 0; n < mesh.num_nodes(); ++n)
  {
    const fem::Point p = mesh.node(n);
    os << FormatDouble(p.x) << ',' << FormatDouble(p.y) << ',' << FormatDouble(field[n]) << '\n';
  }
}

void WriteFieldCsv(const std::filesystem::path &path, const fem::StructuredMesh &mesh,
                   std::span<const double> field)
{
  std::ofstream os(path, std::ios::trunc);
  if (!os)
  {
    throw IoError("cannot open '" + path.string() + "' for writing");
  }
  WriteFieldCsv(os, mesh, field);
  if (!os)
  {
    throw IoError("failed writing '" + path.string() + "'");
  }
}

void WriteJson(const std::filesystem::path &path, const nlohmann::json &j)
{
  std::ofstream os(path, std::ios::trunc);
  if (!os)
  {
    throw IoError("cannot open '" + path.string() + "' for writing");
  }
  os << j.dump(2) << '\n';
  if (!os)
  {
    throw IoError("failed writing '" + path.string() + "'");
  }
}

nlohmann::json ReadJson(const std::filesystem::path &path)
{
  std::ifstream is(path);
  if (!is)
  {
    throw IoError("cannot open '" + path.string() + "'");
  }
  try
  {
    return nlohmann::json::parse(is);
  }
  catch (const nlohmann::json::exception &e)
  {
    throw FormatError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

std::string MuLabel(const nlohmann::json &mu)
{
  if (!mu.is_object()) return {};
  std::string out;
  for (const auto &[k, v] : mu.items())
  {
    if (!out.empty()) out += ',';
    out += k + "=" + (v.is_number() ? FormatDouble(v.get<double>()) : v.dump());
  }
  return out;
}

namespace
{

const nlohmann::json *Find(const nlohmann::json &j, std::initializer_list<const char *> path)
{
  const nlohmann::json *cur = &j;
  for (const char *key : path)
  {
    if (!cur->is_object() || !cur->contains(key)) return nullptr;
    cur = &(*cur)[key];
  }
  return cur;
}

std::string Cell(const nlohmann::json &j, std::initializer_list<const char *> path)
{
  const auto *v = Find(j, path);
  if (!v || v->is_null()) return {};
  if (v->is_number_integer()) return std::to_string(v->get<long long>());
  if (v->is_number())
  {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << v->get<double>();
    return os.str();
  }
  if (v->is_string()) return v->get<std::string>();
  if (v->is_boolean()) return v->get<bool>() ? "true" : "false";
  return v->dump();
}

}  // namespace

Table CompareTable(const std::vector<std::pair<std::string, nlohmann::json>> &reports)
{
  Table t;
  t.columns = {"report", "kind", "mu", "gmres_iterations", "online_seconds",
               "rel_l2_vs_exact", "fem_rel_l2_vs_exact", "rel_linf_vs_fem", "overlap_mismatch"};
  for (const auto &[label, r] : reports)
  {
    const auto *mu = Find(r, {"mu"});
    t.rows.push_back({label,
                      Cell(r, {"kind"}),
                      mu ? MuLabel(*mu) : std::string(),
                      Cell(r, {"gmres", "iterations"}),
                      Cell(r, {"timings", "online_seconds"}),
                      Cell(r, {"errors", "rel_l2_vs_exact"}),
                      Cell(r, {"errors", "fem_rel_l2_vs_exact"}),
                      Cell(r, {"errors", "rel_linf_vs_fem"}),
                      Cell(r, {"overlap_mismatch"})});
  }
  return t;
}

std::string ToMarkdown(const Table &t)
{
  std::ostringstream os;
  auto row = [&os](const std::vector<std::string> &cells)
  {
    os << '|';
    for (const auto &c : cells) os << ' ' << c << " |";
    os << '\n';
  };
  row(t.columns);
  os << '|';
  for (std::size_t k = 0; k < t.columns.size(); ++k) os << " --- |";
  os << '\n';
  for (const auto &r : t.rows) row(r);
  return os.str();
}

std::string ToCsv(const Table &t)
{
  auto quote = [](const std::string &s)
  {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s)
    {
      if (c == '"') out += '"';
      out += c;
    }
    return out + "\"";
  };
  std::ostringstream os;
  auto row = [&](const std::vector<std::string> &cells)
  {
    for (std::size_t k = 0; k < cells.size(); ++k) os << (k ? "," : "") << quote(cells[k]);
    os << '\n';
  };
  row(t.columns);
  for (const auto &r : t.rows) row(r);
  return os.str();
}

}  // namespace ddpgd::report
