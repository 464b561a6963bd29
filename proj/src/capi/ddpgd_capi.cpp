// SPDX-License-Identifier: Apache-2.0

#include "ddpgd/ddpgd.h"

#include <chrono>
#include <cstring>
#include <filesystem>
#include <memory>
#include <new>
#include <string>

#include <nlohmann/json.hpp>

#include "common/counters.hpp"
#include "common/error.hpp"
#include "config/experiment.hpp"
#include "dd/decomposition.hpp"
#include "dd/model_io.hpp"
#include "dd/online.hpp"
#include "reference/reference.hpp"
#include "report/report.hpp"

struct ddpgd_experiment
{
  ddpgd::config::ExperimentConfig cfg;
};

struct ddpgd_model
{
  std::shared_ptr<const ddpgd::dd::SurrogateModel> model;
};

struct ddpgd_online
{
  std::string experiment;
  std::optional<ddpgd::dd::ExactSolution> exact;
  ddpgd::reference::GlobalProblem global;
  ddpgd::dd::ParamValues mu;
  std::unique_ptr<ddpgd::dd::SchwarzProblem> problem;
  ddpgd::counters::Snapshot start_counters;
  double setup_seconds = 0.0;
  std::optional<ddpgd::linalg::GmresResult> result;
  std::optional<ddpgd::dd::GlobalSolution> solution;
};

namespace
{

using Clock = std::chrono::steady_clock;
using json = nlohmann::json;

thread_local std::string g_last_error;

double Seconds(Clock::time_point since)
{
  return std::chrono::duration<double>(Clock::now() - since).count();
}

template <typename F>
ddpgd_status Guard(F &&f)
{
  try
  {
    f();
    g_last_error.clear();
    return DDPGD_OK;
  }
  catch (const ddpgd::Error &e)
  {
    g_last_error = e.what();
    return static_cast<ddpgd_status>(e.kind());
  }
  catch (const json::exception &e)
  {
    g_last_error = std::string("malformed JSON: ") + e.what();
    return DDPGD_ERR_FORMAT;
  }
  catch (const std::bad_alloc &)
  {
    g_last_error = "out of memory";
    return DDPGD_ERR_INTERNAL;
  }
  catch (const std::exception &e)
  {
    g_last_error = e.what();
    return DDPGD_ERR_INTERNAL;
  }
  catch (...)
  {
    g_last_error = "unknown error";
    return DDPGD_ERR_INTERNAL;
  }
}

void Require(bool ok, const char *what)
{
  if (!ok) throw ddpgd::ArgumentError(what);
}

char *Dup(const std::string &s)
{
  char *p = static_cast<char *>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

json MuJson(const ddpgd::dd::ParamValues &mu)
{
  json j = json::object();
  for (const auto &[k, v] : mu) j[k] = v;
  return j;
}

json TolJson(const ddpgd::config::Tolerances &t)
{
  return {{"enrich_tol", t.enrich},         {"compress_tol", t.compress},
          {"gmres_tol", t.gmres},           {"gmres_max_iters", t.gmres_max_iters},
          {"fp_tol", t.fp_tol},             {"fp_max_iters", t.fp_max_iters},
          {"max_modes", t.max_modes},       {"schwarz_tol", t.schwarz},
          {"schwarz_max_iters", t.schwarz_max_iters}};
}

std::optional<std::function<double(double, double)>> ExactAt(
  const std::optional<ddpgd::dd::ExactSolution> &exact, const ddpgd::dd::ParamValues &mu)
{
  if (!exact) return std::nullopt;
  return [exact, mu](double x, double y) { return (*exact)(x, y, mu); };
}

}  // namespace

extern "C" {

const char *ddpgd_version(void) { return "0.1.0"; }

const char *ddpgd_last_error(void) { return g_last_error.c_str(); }

void ddpgd_string_free(char *s) { std::free(s); }

ddpgd_status ddpgd_experiment_open(const char *spec, ddpgd_experiment **out)
{
  return Guard(
    [&]
    {
      Require(spec && out, "ddpgd_experiment_open: null argument");
      *out = nullptr;
      *out = new ddpgd_experiment{ddpgd::config::ResolveConfig(spec)};
    });
}

void ddpgd_experiment_free(ddpgd_experiment *e) { delete e; }

ddpgd_status ddpgd_experiment_set(ddpgd_experiment *e, const char *key, double value)
{
  return Guard(
    [&]
    {
      Require(e && key, "ddpgd_experiment_set: null argument");
      const std::string k = key;
      auto &t = e->cfg.tol;
      auto positive = [&]
      {
        if (!(value > 0.0)) throw ddpgd::ConfigError(k + " must be positive");
        return value;
      };
      auto count = [&]
      {
        if (!(value >= 1.0) || value != static_cast<double>(static_cast<std::size_t>(value)))
        {
          throw ddpgd::ConfigError(k + " must be a positive integer");
        }
        return static_cast<std::size_t>(value);
      };
      if (k == "enrich_tol") t.enrich = positive();
      else if (k == "compress_tol") t.compress = positive();
      else if (k == "gmres_tol") t.gmres = positive();
      else if (k == "gmres_max_iters") t.gmres_max_iters = count();
      else if (k == "fp_tol") t.fp_tol = positive();
      else if (k == "fp_max_iters") t.fp_max_iters = count();
      else if (k == "max_modes") t.max_modes = count();
      else if (k == "schwarz_tol") t.schwarz = positive();
      else if (k == "schwarz_max_iters") t.schwarz_max_iters = count();
      else if (k == "workers") e->cfg.workers = count();
      else if (k == "seed")
      {
        if (!(value >= 0.0) || value != static_cast<double>(static_cast<std::uint64_t>(value)))
        {
          throw ddpgd::ConfigError("seed must be a non-negative integer");
        }
        e->cfg.seed = static_cast<std::uint64_t>(value);
      }
      else throw ddpgd::ArgumentError("unknown setting '" + k + "'");
    });
}

ddpgd_status ddpgd_experiment_info(const ddpgd_experiment *e, char **json_out)
{
  return Guard(
    [&]
    {
      Require(e && json_out, "ddpgd_experiment_info: null argument");
      const auto &c = e->cfg;
      json params = json::array();
      for (const auto &a : c.axes)
      {
        params.push_back({{"name", a.name()}, {"lower", a.lower()}, {"upper", a.upper()}, {"step", a.step()}});
      }
      json subs = json::array();
      for (const auto &r : c.geometry.subdomains) subs.push_back(r.id);
      json queries = json::array();
      for (const auto &q : c.queries) queries.push_back(MuJson(q));
      const json j = {{"name", c.name},       {"parameters", params},     {"subdomains", subs},
                      {"tolerances", TolJson(c.tol)}, {"seed", c.seed}, {"workers", c.workers},
                      {"output_dir", c.output_dir}, {"queries", queries},
                      {"has_exact_solution", c.exact.has_value()}};
      *json_out = Dup(j.dump(2));
    });
}

ddpgd_status ddpgd_offline_build(const ddpgd_experiment *e, const char *out_dir, char **report_json)
{
  return Guard(
    [&]
    {
      Require(e && out_dir, "ddpgd_offline_build: null argument");
      const auto start = Clock::now();
      const auto &c = e->cfg;
      const std::filesystem::path dir(out_dir);
      std::error_code ec;
      std::filesystem::create_directories(dir, ec);
      if (ec) throw ddpgd::IoError("cannot create '" + dir.string() + "': " + ec.message());
      const auto subdomains = ddpgd::dd::Decompose(c.geometry);
      const auto grid = c.Grid();
      json models = json::array();
      for (const auto &sd : subdomains)
      {
        const auto model = ddpgd::dd::BuildSurrogate(sd, grid, c.data, c.Offline());
        const auto path = dir / (sd.id + ".ddpgd");
        ddpgd::dd::SaveModel(model, path);
        json subproblems = json::array();
        for (const auto &s : model.stats)
        {
          subproblems.push_back({{"index", s.index},
                                 {"kind", s.index == 0 ? "source" : "trace"},
                                 {"modes_before", s.modes_before},
                                 {"modes_after", s.modes_after},
                                 {"compression_error", s.compression_error},
                                 {"compression_stagnated", s.compression_stagnated},
                                 {"unconverged_modes", s.unconverged_modes},
                                 {"seconds", s.seconds}});
        }
        std::vector<std::string> axes = model.grid.Names();
        models.push_back({{"id", sd.id},
                          {"file", path.string()},
                          {"interface_nodes", sd.interface_size()},
                          {"subproblems_solved", model.stats.size()},
                          {"parameters", axes},
                          {"modes_before", model.ModesBefore()},
                          {"modes_after", model.ModesAfter()},
                          {"build_seconds", model.build_seconds},
                          {"subproblems", subproblems}});
      }
      const json report = {{"kind", "offline"},
                           {"experiment", c.name},
                           {"seed", c.seed},
                           {"workers", c.workers},
                           {"tolerances", TolJson(c.tol)},
                           {"models", models},
                           {"timings", {{"offline_seconds", Seconds(start)}}}};
      if (report_json) *report_json = Dup(report.dump(2));
    });
}

ddpgd_status ddpgd_model_load(const char *path, ddpgd_model **out)
{
  return Guard(
    [&]
    {
      Require(path && out, "ddpgd_model_load: null argument");
      *out = nullptr;
      auto m = std::make_shared<const ddpgd::dd::SurrogateModel>(ddpgd::dd::LoadModel(path));
      *out = new ddpgd_model{std::move(m)};
    });
}

void ddpgd_model_free(ddpgd_model *m) { delete m; }

ddpgd_status ddpgd_model_info(const ddpgd_model *m, char **json_out)
{
  return Guard(
    [&]
    {
      Require(m && json_out, "ddpgd_model_info: null argument");
      *json_out = Dup(ddpgd::dd::ModelManifest(*m->model).dump(2));
    });
}

ddpgd_status ddpgd_online_create(const ddpgd_experiment *e, const ddpgd_model *const *models,
                                 size_t n_models, const char *mu, ddpgd_online **out)
{
  return Guard(
    [&]
    {
      Require(e && models && mu && out, "ddpgd_online_create: null argument");
      *out = nullptr;
      Require(n_models > 0, "ddpgd_online_create: no models");
      auto o = std::make_unique<ddpgd_online>();
      o->start_counters = ddpgd::counters::Read();
      const auto start = Clock::now();
      const auto &c = e->cfg;
      o->experiment = c.name;
      o->exact = c.exact;
      o->global = c.Global();
      o->mu = ddpgd::config::ParseMu(mu, c.AxisNames());
      // Geometry checks reuse the decomposition, which assembles nothing.
      const auto subdomains = ddpgd::dd::Decompose(c.geometry);
      const auto grid = c.Grid();
      std::vector<std::shared_ptr<const ddpgd::dd::SurrogateModel>> list;
      for (std::size_t k = 0; k < n_models; ++k)
      {
        Require(models[k] != nullptr, "ddpgd_online_create: null model");
        const auto &m = models[k]->model;
        const ddpgd::dd::Subdomain *expected = nullptr;
        for (const auto &sd : subdomains)
        {
          if (sd.id == m->subdomain.id) expected = &sd;
        }
        if (!expected)
        {
          throw ddpgd::ConfigError("model '" + m->subdomain.id + "' is not a subdomain of '" + c.name + "'");
        }
        ddpgd::dd::CheckCompatible(*m, *expected, grid);
        list.push_back(m);
      }
      // Keep the experiment's subdomain order so ownership in overlaps is stable.
      std::stable_sort(list.begin(), list.end(),
                       [&](const auto &a, const auto &b)
                       {
                         auto pos = [&](const std::string &id)
                         {
                           for (std::size_t i = 0; i < subdomains.size(); ++i)
                           {
                             if (subdomains[i].id == id) return i;
                           }
                           return subdomains.size();
                         };
                         return pos(a->subdomain.id) < pos(b->subdomain.id);
                       });
      o->problem = std::make_unique<ddpgd::dd::SchwarzProblem>(std::move(list), o->mu, c.Gmres());
      o->setup_seconds = Seconds(start);
      *out = o.release();
    });
}

void ddpgd_online_free(ddpgd_online *o) { delete o; }

ddpgd_status ddpgd_online_sizes(const ddpgd_online *o, size_t *total, size_t *n_subdomains)
{
  return Guard(
    [&]
    {
      Require(o && o->problem, "ddpgd_online_sizes: null handle");
      if (total) *total = o->problem->total_interface_size();
      if (n_subdomains) *n_subdomains = o->problem->num_subdomains();
    });
}

ddpgd_status ddpgd_online_block(const ddpgd_online *o, size_t i, size_t *offset, size_t *length,
                                size_t *n_nodes)
{
  return Guard(
    [&]
    {
      Require(o && o->problem, "ddpgd_online_block: null handle");
      Require(i < o->problem->num_subdomains(), "ddpgd_online_block: subdomain index out of range");
      if (offset) *offset = o->problem->offset(i);
      if (length) *length = o->problem->offset(i + 1) - o->problem->offset(i);
      if (n_nodes) *n_nodes = o->problem->model(i).subdomain.mesh.num_nodes();
    });
}

ddpgd_status ddpgd_online_apply(const ddpgd_online *o, size_t i, const double *lambda, size_t n,
                                double *out, size_t out_len)
{
  return Guard(
    [&]
    {
      Require(o && o->problem && (lambda || n == 0) && out, "ddpgd_online_apply: null argument");
      Require(i < o->problem->num_subdomains(), "ddpgd_online_apply: subdomain index out of range");
      const auto v = o->problem->OperatorApply(i, std::span<const double>(lambda, n));
      Require(out_len == v.size(), "ddpgd_online_apply: output length differs from node count");
      std::copy(v.begin(), v.end(), out);
    });
}

ddpgd_status ddpgd_online_matvec(const ddpgd_online *o, const double *lambda, size_t n, double *out)
{
  return Guard(
    [&]
    {
      Require(o && o->problem && (lambda || n == 0) && (out || n == 0), "ddpgd_online_matvec: null argument");
      const auto v = o->problem->InterfaceMatvec(std::span<const double>(lambda, n));
      std::copy(v.begin(), v.end(), out);
    });
}

ddpgd_status ddpgd_online_solve(ddpgd_online *o, int compare_fem, char **report_json)
{
  bool converged = true;
  const ddpgd_status st = Guard(
    [&]
    {
      Require(o && o->problem, "ddpgd_online_solve: null handle");
      auto &sp = *o->problem;
      const auto t_solve = Clock::now();
      o->result = sp.SolveInterface();
      const double solve_seconds = Seconds(t_solve);
      const auto t_rec = Clock::now();
      o->solution = sp.Reconstruct(o->result->x);
      const double reconstruct_seconds = Seconds(t_rec);
      const auto online = ddpgd::counters::Delta(o->start_counters, ddpgd::counters::Read());

      const auto &r = *o->result;
      const auto rhs = sp.InterfaceRhs();
      auto res = sp.InterfaceMatvec(r.x);
      ddpgd::linalg::Axpy(-1.0, rhs, res);
      const double rhs_norm = ddpgd::linalg::Norm2(rhs);
      json ids = json::array();
      for (std::size_t i = 0; i < sp.num_subdomains(); ++i) ids.push_back(sp.model(i).subdomain.id);

      json errors = json::object();
      const auto exact = ExactAt(o->exact, o->mu);
      if (exact) errors["rel_l2_vs_exact"] = ddpgd::reference::RelL2Error(o->solution->mesh, o->solution->field, *exact);
      json timings = {{"setup_seconds", o->setup_seconds},
                      {"solve_seconds", solve_seconds},
                      {"reconstruct_seconds", reconstruct_seconds},
                      {"online_seconds", o->setup_seconds + solve_seconds + reconstruct_seconds}};
      if (compare_fem)
      {
        const auto t_fem = Clock::now();
        const auto fem = ddpgd::reference::FullOrderSolve(o->global, o->mu);
        timings["fem_seconds"] = Seconds(t_fem);
        errors["rel_linf_vs_fem"] = ddpgd::reference::RelLinfError(o->solution->field, fem);
        if (exact)
        {
          errors["fem_rel_l2_vs_exact"] =
            ddpgd::reference::RelL2Error(ddpgd::dd::GlobalMesh(o->global.geometry), fem, *exact);
        }
      }
      converged = r.converged();
      const json report = {
        {"kind", "online"},
        {"experiment", o->experiment},
        {"mu", MuJson(o->mu)},
        {"subdomains", ids},
        {"interface_size", sp.total_interface_size()},
        {"gmres",
         {{"iterations", r.iterations},
          {"status", ddpgd::linalg::ToString(r.status)},
          {"converged", r.converged()},
          {"rel_tol", sp.gmres_config().rel_tol},
          {"final_relative_residual", r.final_relative_residual},
          {"true_relative_residual", rhs_norm > 0 ? ddpgd::linalg::Norm2(res) / rhs_norm : 0.0},
          {"residual_history", r.residual_history}}},
        {"overlap_mismatch", o->solution->overlap_mismatch},
        {"errors", errors},
        {"timings", timings},
        {"counters", {{"online_assemblies", online.assemblies}, {"online_factorizations", online.factorizations}}}};
      if (report_json) *report_json = Dup(report.dump(2));
    });
  if (st == DDPGD_OK && !converged)
  {
    g_last_error = "GMRES did not converge (see residual_history in the report)";
    return DDPGD_ERR_SOLVER;
  }
  return st;
}

ddpgd_status ddpgd_online_lambda(const ddpgd_online *o, double *out, size_t n)
{
  return Guard(
    [&]
    {
      Require(o && o->result && (out || n == 0), "ddpgd_online_lambda: no solve yet");
      Require(n == o->result->x.size(), "ddpgd_online_lambda: length mismatch");
      std::copy(o->result->x.begin(), o->result->x.end(), out);
    });
}

ddpgd_status ddpgd_online_write_csv(const ddpgd_online *o, const char *path)
{
  return Guard(
    [&]
    {
      Require(o && o->solution && path, "ddpgd_online_write_csv: no solve yet");
      ddpgd::report::WriteFieldCsv(path, o->solution->mesh, o->solution->field);
    });
}

ddpgd_status ddpgd_reference_run(const ddpgd_experiment *e, const char *mu, const char *method,
                                 const char *csv_prefix, char **report_json)
{
  return Guard(
    [&]
    {
      Require(e && mu && method, "ddpgd_reference_run: null argument");
      const std::string m = method;
      Require(m == "fem" || m == "schwarz" || m == "both", "method must be fem, schwarz or both");
      const auto &c = e->cfg;
      const auto values = ddpgd::config::ParseMu(mu, c.AxisNames());
      (void)c.Grid().Select(values);
      const auto global = c.Global();
      const auto mesh = ddpgd::dd::GlobalMesh(c.geometry);
      const auto exact = ExactAt(c.exact, values);
      json report = {{"kind", "reference"}, {"experiment", c.name}, {"mu", MuJson(values)}};
      json errors = json::object();
      std::optional<ddpgd::linalg::Vector> fem;
      if (m == "fem" || m == "both")
      {
        const auto t0 = Clock::now();
        fem = ddpgd::reference::FullOrderSolve(global, values);
        report["fem"] = {{"seconds", Seconds(t0)}};
        if (exact) errors["fem_rel_l2_vs_exact"] = ddpgd::reference::RelL2Error(mesh, *fem, *exact);
        if (csv_prefix) ddpgd::report::WriteFieldCsv(std::string(csv_prefix) + "_fem.csv", mesh, *fem);
      }
      if (m == "schwarz" || m == "both")
      {
        const auto t0 = Clock::now();
        const auto subdomains = ddpgd::dd::Decompose(c.geometry);
        const auto sw = ddpgd::reference::AlternatingSchwarz(subdomains, c.data, values, c.tol.schwarz,
                                                             c.tol.schwarz_max_iters);
        // Global field with the same ownership rule as the online reconstruction.
        ddpgd::linalg::Vector field(mesh.num_nodes(), 0.0);
        std::vector<char> owned(mesh.num_nodes(), 0);
        for (std::size_t i = 0; i < subdomains.size(); ++i)
        {
          const auto &lm = subdomains[i].mesh;
          for (std::size_t n = 0; n < lm.num_nodes(); ++n)
          {
            const auto p = lm.node(n);
            const auto gi = static_cast<std::size_t>(std::llround((p.x - mesh.origin().x) / mesh.hx()));
            const auto gj = static_cast<std::size_t>(std::llround((p.y - mesh.origin().y) / mesh.hy()));
            const std::size_t g = mesh.node_index(gi, gj);
            if (!owned[g])
            {
              owned[g] = 1;
              field[g] = sw.fields[i][n];
            }
          }
        }
        json sj = {{"iterations", sw.iterations},
                   {"converged", sw.converged},
                   {"tol", c.tol.schwarz},
                   {"seconds", Seconds(t0)},
                   {"mismatch_history", sw.history}};
        if (exact) errors["schwarz_rel_l2_vs_exact"] = ddpgd::reference::RelL2Error(mesh, field, *exact);
        if (fem) errors["schwarz_rel_linf_vs_fem"] = ddpgd::reference::RelLinfError(field, *fem);
        report["schwarz"] = sj;
        if (csv_prefix) ddpgd::report::WriteFieldCsv(std::string(csv_prefix) + "_schwarz.csv", mesh, field);
        if (!sw.converged)
        {
          report["errors"] = errors;
          if (report_json) *report_json = Dup(report.dump(2));
          throw ddpgd::SolverError("alternating Schwarz did not converge in " +
                                   std::to_string(sw.iterations) + " iterations");
        }
      }
      report["errors"] = errors;
      if (report_json) *report_json = Dup(report.dump(2));
    });
}

ddpgd_status ddpgd_compare(const char *const *report_paths, size_t n, const char *format, char **table_out)
{
  return Guard(
    [&]
    {
      Require((report_paths || n == 0) && format && table_out, "ddpgd_compare: null argument");
      const std::string f = format;
      Require(f == "markdown" || f == "csv", "format must be markdown or csv");
      std::vector<std::pair<std::string, json>> reports;
      for (std::size_t k = 0; k < n; ++k)
      {
        Require(report_paths[k] != nullptr, "ddpgd_compare: null path");
        reports.emplace_back(std::filesystem::path(report_paths[k]).filename().string(),
                             ddpgd::report::ReadJson(report_paths[k]));
      }
      const auto table = ddpgd::report::CompareTable(reports);
      *table_out = Dup(f == "csv" ? ddpgd::report::ToCsv(table) : ddpgd::report::ToMarkdown(table));
    });
}

ddpgd_status ddpgd_counters(uint64_t *assemblies, uint64_t *factorizations)
{
  return Guard(
    [&]
    {
      const auto s = ddpgd::counters::Read();
      if (assemblies) *assemblies = s.assemblies;
      if (factorizations) *factorizations = s.factorizations;
    });
}

}  // extern "C"
