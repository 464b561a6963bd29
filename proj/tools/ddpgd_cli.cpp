// SPDX-License-Identifier: Apache-2.0
//
// Command-line driver over the C API: offline, online, reference and compare verbs.

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ddpgd/ddpgd.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace
{

// Carries a status code out of a verb together with the message to print.
struct Failure
{
  ddpgd_status status;
  std::string message;
};

void Check(ddpgd_status s)
{
  if (s != DDPGD_OK)
  {
    throw Failure{s, ddpgd_last_error()};
  }
}

std::string TakeString(char *s)
{
  std::string out = s ? s : "";
  ddpgd_string_free(s);
  return out;
}

struct ExperimentDeleter
{
  void operator()(ddpgd_experiment *e) const { ddpgd_experiment_free(e); }
};
struct ModelDeleter
{
  void operator()(ddpgd_model *m) const { ddpgd_model_free(m); }
};
struct OnlineDeleter
{
  void operator()(ddpgd_online *o) const { ddpgd_online_free(o); }
};
using Experiment = std::unique_ptr<ddpgd_experiment, ExperimentDeleter>;
using Model = std::unique_ptr<ddpgd_model, ModelDeleter>;
using Online = std::unique_ptr<ddpgd_online, OnlineDeleter>;

struct Common
{
  std::string config = "bidomain";
  std::string out;
  std::optional<int> workers;
  std::optional<long long> seed;
  std::map<std::string, double> overrides;
};

void AddCommon(CLI::App *cmd, Common &c)
{
  cmd->add_option("-c,--config", c.config, "YAML config path or built-in name (bidomain, chain9)")
    ->capture_default_str();
  cmd->add_option("-o,--out", c.out, "Output directory (default: $DDPGD_OUT_DIR, config output.dir, ddpgd_out/<name>)");
  cmd->add_option("--workers", c.workers, "Offline worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", c.seed, "RNG seed")->check(CLI::NonNegativeNumber);
  const std::vector<std::pair<const char *, const char *>> tols = {
    {"--tol-enrich", "enrich_tol"}, {"--tol-compress", "compress_tol"}, {"--tol-gmres", "gmres_tol"},
    {"--tol-fp", "fp_tol"},         {"--tol-schwarz", "schwarz_tol"},
  };
  for (const auto &[flag, key] : tols)
  {
    const std::string k = key;
    cmd->add_option_function<double>(
      flag, [&c, k](const double &v) { c.overrides[k] = v; }, "Override " + k);
  }
  const std::vector<std::pair<const char *, const char *>> counts = {
    {"--max-modes", "max_modes"},
    {"--gmres-max-iters", "gmres_max_iters"},
    {"--fp-max-iters", "fp_max_iters"},
    {"--schwarz-max-iters", "schwarz_max_iters"},
  };
  for (const auto &[flag, key] : counts)
  {
    const std::string k = key;
    cmd->add_option_function<std::size_t>(
         flag, [&c, k](const std::size_t &v) { c.overrides[k] = static_cast<double>(v); }, "Override " + k)
      ->check(CLI::PositiveNumber);
  }
}

Experiment OpenExperiment(const Common &c)
{
  ddpgd_experiment *raw = nullptr;
  Check(ddpgd_experiment_open(c.config.c_str(), &raw));
  Experiment e(raw);
  for (const auto &[k, v] : c.overrides)
  {
    Check(ddpgd_experiment_set(e.get(), k.c_str(), v));
  }
  if (c.workers)
  {
    Check(ddpgd_experiment_set(e.get(), "workers", *c.workers));
  }
  if (c.seed)
  {
    Check(ddpgd_experiment_set(e.get(), "seed", static_cast<double>(*c.seed)));
  }
  return e;
}

json Info(const ddpgd_experiment *e)
{
  char *s = nullptr;
  Check(ddpgd_experiment_info(e, &s));
  return json::parse(TakeString(s));
}

fs::path OutputDir(const Common &c, const json &info)
{
  if (!c.out.empty())
  {
    return c.out;
  }
  if (const char *env = std::getenv("DDPGD_OUT_DIR"); env && *env)
  {
    return env;
  }
  if (const auto dir = info.value("output_dir", std::string()); !dir.empty())
  {
    return dir;
  }
  return fs::path("ddpgd_out") / info.at("name").get<std::string>();
}

void MakeDir(const fs::path &dir)
{
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
  {
    throw Failure{DDPGD_ERR_IO, "cannot create directory '" + dir.string() + "': " + ec.message()};
  }
}

void WriteText(const fs::path &path, const std::string &text)
{
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f)
  {
    throw Failure{DDPGD_ERR_IO, "cannot write '" + path.string() + "'"};
  }
}

// A (mu argument, file label) pair; defaults to the config's query list.
std::vector<std::pair<std::string, std::string>> Queries(const std::vector<std::string> &mus,
                                                         const json &info)
{
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto &m : mus)
  {
    std::string label;
    for (char ch : m)
    {
      const bool keep = std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '-' || ch == '=';
      label += keep ? ch : '_';
    }
    out.emplace_back(m, label);
  }
  if (out.empty())
  {
    std::size_t k = 0;
    for (const auto &q : info.at("queries"))
    {
      std::string m;
      for (const auto &[name, v] : q.items())
      {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
        m += (m.empty() ? "" : ",") + name + "=" + buf;
      }
      out.emplace_back(m, "query" + std::to_string(++k));
    }
  }
  if (out.empty())
  {
    throw Failure{DDPGD_ERR_ARGUMENT, "no --mu given and the config lists no queries"};
  }
  return out;
}

int RunOffline(const Common &c)
{
  const Experiment e = OpenExperiment(c);
  const json info = Info(e.get());
  const fs::path dir = OutputDir(c, info);
  MakeDir(dir);
  char *s = nullptr;
  Check(ddpgd_offline_build(e.get(), dir.string().c_str(), &s));
  const json report = json::parse(TakeString(s));
  WriteText(dir / "offline_report.json", report.dump(2) + "\n");
  for (const auto &m : report.at("models"))
  {
    std::printf("%s: %zu subproblems, modes %zu -> %zu, %.2f s -> %s\n",
                m.at("id").get<std::string>().c_str(), m.at("subproblems_solved").get<std::size_t>(),
                m.at("modes_before").get<std::size_t>(), m.at("modes_after").get<std::size_t>(),
                m.at("build_seconds").get<double>(), m.at("file").get<std::string>().c_str());
  }
  std::printf("report: %s\n", (dir / "offline_report.json").string().c_str());
  return DDPGD_OK;
}

int RunOnline(const Common &c, std::vector<std::string> model_paths, const std::vector<std::string> &mus,
              bool compare_fem)
{
  const Experiment e = OpenExperiment(c);
  const json info = Info(e.get());
  const fs::path dir = OutputDir(c, info);
  if (model_paths.empty())
  {
    for (const auto &id : info.at("subdomains"))
    {
      model_paths.push_back((dir / (id.get<std::string>() + ".ddpgd")).string());
    }
  }
  std::vector<Model> models;
  std::vector<const ddpgd_model *> raw;
  for (const auto &p : model_paths)
  {
    ddpgd_model *m = nullptr;
    Check(ddpgd_model_load(p.c_str(), &m));
    models.emplace_back(m);
    raw.push_back(m);
  }
  const auto queries = Queries(mus, info);
  MakeDir(dir);
  int status = DDPGD_OK;
  for (const auto &[mu, label] : queries)
  {
    ddpgd_online *o = nullptr;
    Check(ddpgd_online_create(e.get(), raw.data(), raw.size(), mu.c_str(), &o));
    const Online online(o);
    char *s = nullptr;
    const ddpgd_status st = ddpgd_online_solve(online.get(), compare_fem ? 1 : 0, &s);
    if (!s)
    {
      Check(st);
    }
    const std::string error = st == DDPGD_OK ? std::string() : ddpgd_last_error();
    const json report = json::parse(TakeString(s));
    const fs::path base = dir / ("online_" + label);
    WriteText(base.string() + ".json", report.dump(2) + "\n");
    if (st == DDPGD_OK)
    {
      Check(ddpgd_online_write_csv(online.get(), (base.string() + ".csv").c_str()));
    }
    const auto &g = report.at("gmres");
    std::printf("mu %s: gmres %zu iterations (%s)", mu.c_str(), g.at("iterations").get<std::size_t>(),
                g.at("status").get<std::string>().c_str());
    const auto &errs = report.at("errors");
    if (errs.contains("rel_l2_vs_exact"))
    {
      std::printf(", rel L2 vs exact %.4e", errs["rel_l2_vs_exact"].get<double>());
    }
    if (errs.contains("rel_linf_vs_fem"))
    {
      std::printf(", rel linf vs FEM %.3e", errs["rel_linf_vs_fem"].get<double>());
    }
    std::printf(" -> %s.json\n", base.string().c_str());
    if (st != DDPGD_OK)
    {
      std::fprintf(stderr, "error: %s\n", error.c_str());
      if (status == DDPGD_OK) status = st;
    }
  }
  return status;
}

int RunReference(const Common &c, const std::vector<std::string> &mus, const std::string &method)
{
  const Experiment e = OpenExperiment(c);
  const json info = Info(e.get());
  const fs::path dir = OutputDir(c, info);
  MakeDir(dir);
  int status = DDPGD_OK;
  for (const auto &[mu, label] : Queries(mus, info))
  {
    const fs::path base = dir / ("reference_" + label);
    char *s = nullptr;
    const ddpgd_status st = ddpgd_reference_run(e.get(), mu.c_str(), method.c_str(), base.string().c_str(), &s);
    if (!s)
    {
      Check(st);
    }
    const std::string error = st == DDPGD_OK ? std::string() : ddpgd_last_error();
    const json report = json::parse(TakeString(s));
    WriteText(base.string() + ".json", report.dump(2) + "\n");
    std::printf("mu %s:", mu.c_str());
    for (const auto &[k, v] : report.at("errors").items())
    {
      std::printf(" %s %.4e", k.c_str(), v.get<double>());
    }
    std::printf(" -> %s.json\n", base.string().c_str());
    if (st != DDPGD_OK)
    {
      std::fprintf(stderr, "error: %s\n", error.c_str());
      if (status == DDPGD_OK) status = st;
    }
  }
  return status;
}

int RunCompare(const std::vector<std::string> &reports, const std::string &format, const std::string &out)
{
  std::vector<const char *> paths;
  for (const auto &r : reports) paths.push_back(r.c_str());
  char *s = nullptr;
  Check(ddpgd_compare(paths.data(), paths.size(), format.c_str(), &s));
  const std::string table = TakeString(s);
  if (out.empty())
  {
    std::fputs(table.c_str(), stdout);
  }
  else
  {
    WriteText(out, table);
  }
  return DDPGD_OK;
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Overlapping Schwarz domain decomposition with PGD surrogates", "ddpgd"};
  app.set_version_flag("--version", std::string(ddpgd_version()));
  app.require_subcommand(1);

  Common offline_opts, online_opts, reference_opts;
  auto *offline = app.add_subcommand("offline", "Build and save one surrogate model per subdomain");
  AddCommon(offline, offline_opts);

  std::vector<std::string> online_mus, models;
  bool compare_fem = false;
  auto *online = app.add_subcommand("online", "Solve the interface problem at parameter values");
  AddCommon(online, online_opts);
  online->add_option("--mu", online_mus, "Parameter value: 3, a tuple 1,2,... or name=value,... (repeatable)");
  online->add_option("--models", models, "Model files (default: <out>/<id>.ddpgd)");
  online->add_flag("--compare-fem", compare_fem, "Also run the full-order FEM and report errors against it");

  std::vector<std::string> reference_mus;
  std::string method = "both";
  auto *reference = app.add_subcommand("reference", "Full-order FEM and/or alternating Schwarz oracle");
  AddCommon(reference, reference_opts);
  reference->add_option("--mu", reference_mus, "Parameter value (repeatable)");
  reference->add_option("--method", method, "fem, schwarz or both")
    ->check(CLI::IsMember({"fem", "schwarz", "both"}))
    ->capture_default_str();

  std::vector<std::string> reports;
  std::string format = "markdown", table_out;
  auto *compare = app.add_subcommand("compare", "Merge run reports into a table");
  compare->add_option("reports", reports, "Report JSON files")->required();
  compare->add_option("--format", format, "markdown or csv")
    ->check(CLI::IsMember({"markdown", "csv"}))
    ->capture_default_str();
  compare->add_option("-o,--out", table_out, "Write the table to a file instead of stdout");

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError &err)
  {
    const int code = app.exit(err);
    return code == 0 ? 0 : DDPGD_ERR_ARGUMENT;
  }

  try
  {
    if (*offline) return RunOffline(offline_opts);
    if (*online) return RunOnline(online_opts, models, online_mus, compare_fem);
    if (*reference) return RunReference(reference_opts, reference_mus, method);
    if (*compare) return RunCompare(reports, format, table_out);
  }
  catch (const Failure &f)
  {
    std::fprintf(stderr, "error: %s\n", f.message.c_str());
    return f.status;
  }
  catch (const std::exception &ex)
  {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return DDPGD_ERR_INTERNAL;
  }
  return DDPGD_ERR_ARGUMENT;
}
