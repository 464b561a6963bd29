// SPDX-License-Identifier: Apache-2.0

#ifndef DDPGD_REPORT_REPORT_HPP
#define DDPGD_REPORT_REPORT_HPP

#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fem/mesh.hpp"

namespace ddpgd::report
{

// Shortest decimal form that parses back to the same double.
std::string FormatDouble(double v);

// Header "x,y,value" then one row per node.
void WriteFieldCsv(std::ostream &os, const fem::StructuredMesh &mesh, std::span<const double> field);
void WriteFieldCsv(const std::filesystem::path &path, const fem::StructuredMesh &mesh,
                   std::span<const double> field);

void WriteJson(const std::filesystem::path &path, const nlohmann::json &j);
nlohmann::json ReadJson(const std::filesystem::path &path);

// One row per report: label, mu, GMRES iterations, online time and the error fields.
// Fields a report lacks become empty cells.
struct Table
{
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

Table CompareTable(const std::vector<std::pair<std::string, nlohmann::json>> &reports);
std::string ToMarkdown(const Table &t);
std::string ToCsv(const Table &t);

// "mu=3" or "mu1=0.1,mu2=0.2"; used for file names and table cells.
std::string MuLabel(const nlohmann::json &mu);

}  // namespace ddpgd::report

#endif  // DDPGD_REPORT_REPORT_HPP
