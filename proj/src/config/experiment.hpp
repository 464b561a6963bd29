// SPDX-License-Identifier: Apache-2.0

#ifndef DDPGD_CONFIG_EXPERIMENT_HPP
#define DDPGD_CONFIG_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dd/offline.hpp"
#include "dd/problem.hpp"
#include "linalg/gmres.hpp"
#include "reference/reference.hpp"
#include "separated/param_grid.hpp"

namespace ddpgd::config
{

struct Tolerances
{
  double enrich = 1e-4;
  double compress = 1e-3;
  double gmres = 1e-6;
  std::size_t gmres_max_iters = 1000;
  double fp_tol = 1e-3;
  std::size_t fp_max_iters = 25;
  std::size_t max_modes = 50;
  double schwarz = 1e-8;
  std::size_t schwarz_max_iters = 2000;
};

struct ExperimentConfig
{
  std::string name;
  dd::Geometry geometry;
  std::vector<separated::ParamAxis> axes;
  dd::ProblemData data;
  std::optional<dd::ExactSolution> exact;
  std::string exact_text;
  Tolerances tol;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  std::string output_dir;
  // Parameter sets used when a command is given no --mu.
  std::vector<dd::ParamValues> queries;

  separated::ParamGrid Grid() const;
  std::vector<std::string> AxisNames() const;
  reference::GlobalProblem Global() const;
  dd::OfflineOptions Offline() const;
  linalg::GmresConfig Gmres() const;
};

// Parses YAML text; errors are ConfigError("<source>:<line>: <field>: <message>").
ExperimentConfig ParseConfig(const std::string &text, const std::string &source = "<config>");
ExperimentConfig LoadConfig(const std::filesystem::path &path);

// Built-in experiments keyed by name; the text is the YAML document.
const std::map<std::string, std::string> &BuiltinConfigs();

// A path to an existing file, otherwise the name of a built-in experiment.
ExperimentConfig ResolveConfig(const std::string &spec);

// "3", "0.1,0.2,...,0.2" (axis order) or "mu1=0.1,mu2=..." into named values.
dd::ParamValues ParseMu(const std::string &text, const std::vector<std::string> &axis_names);

}  // namespace ddpgd::config

#endif  // DDPGD_CONFIG_EXPERIMENT_HPP
