// SPDX-License-Identifier: Apache-2.0

#include "config/experiment.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "common/error.hpp"
#include "config/expression.hpp"
#include "dd/decomposition.hpp"

namespace ddpgd::config
{

namespace
{

class Reader
{
public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void Fail(const YAML::Node &node, const std::string &field, const std::string &what) const
  {
    std::ostringstream msg;
    msg << source_;
    if (node.IsDefined() && node.Mark().line >= 0) msg << ':' << node.Mark().line + 1;
    msg << ": " << field << ": " << what;
    throw ConfigError(msg.str());
  }

  void AllowKeys(const YAML::Node &node, const std::string &field, std::set<std::string> keys) const
  {
    if (!node.IsMap()) Fail(node, field, "expected a mapping");
    for (const auto &kv : node)
    {
      const auto key = kv.first.as<std::string>();
      if (!keys.count(key)) Fail(kv.first, field, "unknown key '" + key + "'");
    }
  }

  YAML::Node Require(const YAML::Node &node, const std::string &key, const std::string &field) const
  {
    const YAML::Node v = node[key];
    if (!v.IsDefined() || v.IsNull()) Fail(node, Join(field, key), "missing");
    return v;
  }

  template <typename T>
  T Get(const YAML::Node &node, const std::string &field, const char *type) const
  {
    try
    {
      return node.as<T>();
    }
    catch (const YAML::Exception &)
    {
      Fail(node, field, std::string("expected ") + type);
    }
  }

  double Real(const YAML::Node &node, const std::string &field) const
  {
    return Get<double>(node, field, "a number");
  }

  double Positive(const YAML::Node &node, const std::string &field) const
  {
    const double v = Real(node, field);
    if (!(v > 0.0)) Fail(node, field, "must be positive");
    return v;
  }

  std::size_t Count(const YAML::Node &node, const std::string &field) const
  {
    const auto v = Get<long long>(node, field, "an integer");
    if (v < 1) Fail(node, field, "must be at least 1");
    return static_cast<std::size_t>(v);
  }

  std::string Text(const YAML::Node &node, const std::string &field) const
  {
    if (!node.IsScalar()) Fail(node, field, "expected a string");
    return node.as<std::string>();
  }

  fem::Point Pair(const YAML::Node &node, const std::string &field) const
  {
    if (!node.IsSequence() || node.size() != 2) Fail(node, field, "expected [x, y]");
    return {Real(node[0], field), Real(node[1], field)};
  }

  Expression Expr(const YAML::Node &node, const std::string &field,
                  const std::vector<std::string> &vars) const
  {
    const std::string text = node.IsScalar() ? node.as<std::string>() : std::string();
    if (text.empty()) Fail(node, field, "expected an expression");
    try
    {
      return Expression::Parse(text, vars);
    }
    catch (const ConfigError &e)
    {
      Fail(node, field, e.what());
    }
  }

  static std::string Join(const std::string &a, const std::string &b) { return a.empty() ? b : a + "." + b; }

private:
  std::string source_;
};

dd::Rectangle ReadRect(const Reader &rd, const YAML::Node &node, const std::string &field, bool with_id)
{
  rd.AllowKeys(node, field, with_id ? std::set<std::string>{"id", "lower", "upper"}
                                    : std::set<std::string>{"lower", "upper"});
  dd::Rectangle r;
  if (with_id) r.id = rd.Text(rd.Require(node, "id", field), field + ".id");
  r.lower = rd.Pair(rd.Require(node, "lower", field), field + ".lower");
  r.upper = rd.Pair(rd.Require(node, "upper", field), field + ".upper");
  if (!(r.upper.x > r.lower.x && r.upper.y > r.lower.y))
  {
    rd.Fail(node, field, "upper corner must exceed lower corner");
  }
  return r;
}

fem::ScalarField SpatialField(const Expression &e)
{
  return {[e](double x, double y)
          {
            const double v[2] = {x, y};
            return e.Evaluate(v);
          },
          e.text()};
}

std::vector<dd::DataTerm> ReadTerms(const Reader &rd, const YAML::Node &node, const std::string &field,
                                    const std::vector<std::string> &axis_names, bool neumann,
                                    const dd::Geometry &geometry)
{
  std::vector<dd::DataTerm> out;
  if (!node.IsDefined() || node.IsNull()) return out;
  if (!node.IsSequence()) rd.Fail(node, field, "expected a list of terms");
  for (std::size_t k = 0; k < node.size(); ++k)
  {
    const YAML::Node t = node[k];
    const std::string f = field + "[" + std::to_string(k) + "]";
    rd.AllowKeys(t, f, neumann ? std::set<std::string>{"space", "param", "side"}
                               : std::set<std::string>{"space", "param"});
    dd::DataTerm term;
    const Expression space = rd.Expr(rd.Require(t, "space", f), f + ".space", {"x", "y"});
    term.spatial = SpatialField(space);
    if (neumann)
    {
      const YAML::Node s = rd.Require(t, "side", f);
      term.side = rd.Text(s, f + ".side");
      fem::Side side{};
      try
      {
        side = fem::SideFromString(term.side);
      }
      catch (const Error &)
      {
        rd.Fail(s, f + ".side", "expected left, right, bottom or top");
      }
      if (geometry.exterior_kind(side) != dd::ExteriorKind::Neumann)
      {
        rd.Fail(s, f + ".side", "side '" + term.side + "' is not a Neumann boundary");
      }
    }
    const YAML::Node param = t["param"];
    if (param.IsDefined() && !param.IsNull())
    {
      if (!param.IsMap()) rd.Fail(param, f + ".param", "expected a mapping axis: expression");
      for (const auto &kv : param)
      {
        const std::string axis = kv.first.as<std::string>();
        if (std::find(axis_names.begin(), axis_names.end(), axis) == axis_names.end())
        {
          rd.Fail(kv.first, f + ".param", "unknown parameter '" + axis + "'");
        }
        const Expression e = rd.Expr(kv.second, f + ".param." + axis, {axis});
        term.factors.push_back({axis,
                                [e](double mu)
                                {
                                  const double v[1] = {mu};
                                  return e.Evaluate(v);
                                },
                                e.text()});
      }
    }
    out.push_back(std::move(term));
  }
  return out;
}

dd::ParamValues ReadQuery(const Reader &rd, const YAML::Node &node, const std::string &field,
                          const std::vector<std::string> &axis_names)
{
  if (!node.IsMap()) rd.Fail(node, field, "expected a mapping parameter: value");
  dd::ParamValues mu;
  for (const auto &kv : node)
  {
    const std::string axis = kv.first.as<std::string>();
    if (std::find(axis_names.begin(), axis_names.end(), axis) == axis_names.end())
    {
      rd.Fail(kv.first, field, "unknown parameter '" + axis + "'");
    }
    mu[axis] = rd.Real(kv.second, field + "." + axis);
  }
  for (const auto &a : axis_names)
  {
    if (!mu.count(a)) rd.Fail(node, field, "missing parameter '" + a + "'");
  }
  return mu;
}

}  // namespace

separated::ParamGrid ExperimentConfig::Grid() const { return separated::ParamGrid(axes); }

std::vector<std::string> ExperimentConfig::AxisNames() const
{
  std::vector<std::string> out;
  for (const auto &a : axes) out.push_back(a.name());
  return out;
}

reference::GlobalProblem ExperimentConfig::Global() const { return {geometry, data, exact}; }

dd::OfflineOptions ExperimentConfig::Offline() const
{
  dd::OfflineOptions o;
  o.pgd.enrich_tol = tol.enrich;
  o.pgd.max_modes = tol.max_modes;
  o.pgd.fp_tol = tol.fp_tol;
  o.pgd.fp_max_iters = tol.fp_max_iters;
  o.compress_tol = tol.compress;
  o.workers = workers;
  o.seed = seed;
  return o;
}

linalg::GmresConfig ExperimentConfig::Gmres() const
{
  linalg::GmresConfig g;
  g.rel_tol = tol.gmres;
  g.max_iters = tol.gmres_max_iters;
  return g;
}

ExperimentConfig ParseConfig(const std::string &text, const std::string &source)
{
  YAML::Node root;
  try
  {
    root = YAML::Load(text);
  }
  catch (const YAML::ParserException &e)
  {
    throw ConfigError(source + ":" + std::to_string(e.mark.line + 1) + ": malformed YAML: " + e.msg);
  }
  const Reader rd(source);
  rd.AllowKeys(root, "", {"name", "geometry", "parameters", "data", "exact", "solver", "seed",
                          "workers", "output", "queries"});
  ExperimentConfig cfg;
  cfg.name = root["name"].IsDefined() ? rd.Text(root["name"], "name") : std::string("experiment");

  // geometry
  const YAML::Node g = rd.Require(root, "geometry", "");
  rd.AllowKeys(g, "geometry", {"domain", "h", "boundary", "subdomains"});
  cfg.geometry.domain = ReadRect(rd, rd.Require(g, "domain", "geometry"), "geometry.domain", false);
  cfg.geometry.domain.id = "domain";
  cfg.geometry.h = rd.Positive(rd.Require(g, "h", "geometry"), "geometry.h");
  const YAML::Node bnd = g["boundary"];
  if (bnd.IsDefined())
  {
    rd.AllowKeys(bnd, "geometry.boundary", {"left", "right", "bottom", "top"});
    for (const auto &kv : bnd)
    {
      const std::string side = kv.first.as<std::string>();
      const std::string kind = rd.Text(kv.second, "geometry.boundary." + side);
      dd::ExteriorKind k{};
      if (kind == "dirichlet")
        k = dd::ExteriorKind::Dirichlet;
      else if (kind == "neumann")
        k = dd::ExteriorKind::Neumann;
      else
        rd.Fail(kv.second, "geometry.boundary." + side, "expected dirichlet or neumann");
      cfg.geometry.exterior[static_cast<int>(fem::SideFromString(side))] = k;
    }
  }
  const YAML::Node subs = rd.Require(g, "subdomains", "geometry");
  if (!subs.IsSequence() || subs.size() == 0) rd.Fail(subs, "geometry.subdomains", "expected a non-empty list");
  for (std::size_t k = 0; k < subs.size(); ++k)
  {
    cfg.geometry.subdomains.push_back(
      ReadRect(rd, subs[k], "geometry.subdomains[" + std::to_string(k) + "]", true));
  }
  try
  {
    dd::Decompose(cfg.geometry);
  }
  catch (const ConfigError &e)
  {
    rd.Fail(subs, "geometry.subdomains", e.what());
  }

  // parameters
  const YAML::Node params = rd.Require(root, "parameters", "");
  if (!params.IsSequence() || params.size() == 0) rd.Fail(params, "parameters", "expected a non-empty list");
  for (std::size_t k = 0; k < params.size(); ++k)
  {
    const YAML::Node p = params[k];
    const std::string f = "parameters[" + std::to_string(k) + "]";
    rd.AllowKeys(p, f, {"name", "lower", "upper", "step"});
    const std::string name = rd.Text(rd.Require(p, "name", f), f + ".name");
    if (name == "x" || name == "y" || name == "pi")
    {
      rd.Fail(p, f + ".name", "'" + name + "' is reserved");
    }
    const double lo = rd.Real(rd.Require(p, "lower", f), f + ".lower");
    const double hi = rd.Real(rd.Require(p, "upper", f), f + ".upper");
    const double step = rd.Positive(rd.Require(p, "step", f), f + ".step");
    if (!(hi > lo)) rd.Fail(p, f, "interval is degenerate");
    try
    {
      cfg.axes.emplace_back(name, lo, hi, step);
    }
    catch (const Error &e)
    {
      rd.Fail(p, f, e.what());
    }
  }
  try
  {
    (void)cfg.Grid();
  }
  catch (const Error &e)
  {
    rd.Fail(params, "parameters", e.what());
  }
  const auto names = cfg.AxisNames();

  // data
  const YAML::Node data = rd.Require(root, "data", "");
  rd.AllowKeys(data, "data", {"diffusion", "source", "neumann"});
  cfg.data.diffusion = ReadTerms(rd, rd.Require(data, "diffusion", "data"), "data.diffusion", names, false, cfg.geometry);
  if (cfg.data.diffusion.empty()) rd.Fail(data, "data.diffusion", "at least one term is required");
  cfg.data.source = ReadTerms(rd, data["source"], "data.source", names, false, cfg.geometry);
  cfg.data.neumann = ReadTerms(rd, data["neumann"], "data.neumann", names, true, cfg.geometry);

  if (root["exact"].IsDefined())
  {
    std::vector<std::string> vars{"x", "y"};
    vars.insert(vars.end(), names.begin(), names.end());
    const Expression e = rd.Expr(root["exact"], "exact", vars);
    cfg.exact_text = e.text();
    cfg.exact = [e, names](double x, double y, const dd::ParamValues &mu)
    {
      std::vector<double> v{x, y};
      for (const auto &n : names)
      {
        auto it = mu.find(n);
        if (it == mu.end()) throw DomainError("no value given for parameter '" + n + "'");
        v.push_back(it->second);
      }
      return e.Evaluate(v);
    };
  }

  if (const YAML::Node s = root["solver"]; s.IsDefined())
  {
    rd.AllowKeys(s, "solver", {"enrich_tol", "compress_tol", "gmres_tol", "gmres_max_iters", "fp_tol",
                               "fp_max_iters", "max_modes", "schwarz_tol", "schwarz_max_iters"});
    auto &t = cfg.tol;
    if (s["enrich_tol"]) t.enrich = rd.Positive(s["enrich_tol"], "solver.enrich_tol");
    if (s["compress_tol"]) t.compress = rd.Positive(s["compress_tol"], "solver.compress_tol");
    if (s["gmres_tol"]) t.gmres = rd.Positive(s["gmres_tol"], "solver.gmres_tol");
    if (s["gmres_max_iters"]) t.gmres_max_iters = rd.Count(s["gmres_max_iters"], "solver.gmres_max_iters");
    if (s["fp_tol"]) t.fp_tol = rd.Positive(s["fp_tol"], "solver.fp_tol");
    if (s["fp_max_iters"]) t.fp_max_iters = rd.Count(s["fp_max_iters"], "solver.fp_max_iters");
    if (s["max_modes"]) t.max_modes = rd.Count(s["max_modes"], "solver.max_modes");
    if (s["schwarz_tol"]) t.schwarz = rd.Positive(s["schwarz_tol"], "solver.schwarz_tol");
    if (s["schwarz_max_iters"]) t.schwarz_max_iters = rd.Count(s["schwarz_max_iters"], "solver.schwarz_max_iters");
  }
  if (root["seed"]) cfg.seed = rd.Get<std::uint64_t>(root["seed"], "seed", "a non-negative integer");
  if (root["workers"]) cfg.workers = rd.Count(root["workers"], "workers");
  if (const YAML::Node o = root["output"]; o.IsDefined())
  {
    rd.AllowKeys(o, "output", {"dir"});
    if (o["dir"]) cfg.output_dir = rd.Text(o["dir"], "output.dir");
  }
  if (const YAML::Node q = root["queries"]; q.IsDefined())
  {
    if (!q.IsSequence()) rd.Fail(q, "queries", "expected a list");
    for (std::size_t k = 0; k < q.size(); ++k)
    {
      cfg.queries.push_back(ReadQuery(rd, q[k], "queries[" + std::to_string(k) + "]", names));
    }
  }
  return cfg;
}

ExperimentConfig LoadConfig(const std::filesystem::path &path)
{
  std::ifstream is(path);
  if (!is)
  {
    throw IoError("cannot open config '" + path.string() + "'");
  }
  std::stringstream ss;
  ss << is.rdbuf();
  return ParseConfig(ss.str(), path.string());
}

ExperimentConfig ResolveConfig(const std::string &spec)
{
  std::error_code ec;
  if (std::filesystem::is_regular_file(spec, ec))
  {
    return LoadConfig(spec);
  }
  const auto &builtins = BuiltinConfigs();
  auto it = builtins.find(spec);
  if (it == builtins.end())
  {
    std::string known;
    for (const auto &[name, text] : builtins) known += (known.empty() ? "" : ", ") + name;
    throw ConfigError("'" + spec + "' is neither a config file nor a built-in experiment (" + known + ")");
  }
  return ParseConfig(it->second, "builtin:" + spec);
}

dd::ParamValues ParseMu(const std::string &text, const std::vector<std::string> &axis_names)
{
  auto number = [&](const std::string &s)
  {
    double v = 0.0;
    const char *b = s.data();
    const char *e = s.data() + s.size();
    while (b < e && *b == ' ') ++b;
    while (e > b && e[-1] == ' ') --e;
    auto [ptr, err] = std::from_chars(b, e, v);
    if (err != std::errc() || ptr != e)
    {
      throw ArgumentError("--mu: '" + s + "' is not a number");
    }
    return v;
  };
  std::vector<std::string> items;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) items.push_back(item);
  dd::ParamValues mu;
  const bool named = text.find('=') != std::string::npos;
  if (named)
  {
    for (const auto &item : items)
    {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw ArgumentError("--mu: mix of named and positional values");
      std::string name = item.substr(0, eq);
      name.erase(0, name.find_first_not_of(' '));
      name.erase(name.find_last_not_of(' ') + 1);
      if (std::find(axis_names.begin(), axis_names.end(), name) == axis_names.end())
      {
        throw ArgumentError("--mu: unknown parameter '" + name + "'");
      }
      mu[name] = number(item.substr(eq + 1));
    }
  }
  else
  {
    if (items.size() != axis_names.size())
    {
      throw ArgumentError("--mu: expected " + std::to_string(axis_names.size()) + " value(s), got " +
                          std::to_string(items.size()));
    }
    for (std::size_t k = 0; k < items.size(); ++k) mu[axis_names[k]] = number(items[k]);
  }
  for (const auto &a : axis_names)
  {
    if (!mu.count(a)) throw ArgumentError("--mu: missing parameter '" + a + "'");
  }
  return mu;
}

}  // namespace ddpgd::config
