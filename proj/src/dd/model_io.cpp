// SPDX-License-Identifier: Apache-2.0

#include "dd/model_io.hpp"

#include <cstring>
#include <fstream>

#include "common/binary_io.hpp"
#include "common/error.hpp"
#include "separated/serialization.hpp"

namespace ddpgd::dd
{

namespace
{

constexpr char kMagic[8] = {'D', 'D', 'P', 'G', 'D', 'M', 'D', 'L'};

// Trace values are exact by construction; the check only catches damaged files.
constexpr double kTraceTolerance = 1e-8;

fem::BoundaryTag TagFromString(const std::string &s)
{
  for (auto t : {fem::BoundaryTag::ExteriorDirichlet, fem::BoundaryTag::ExteriorNeumann,
                 fem::BoundaryTag::Interface})
  {
    if (s == fem::ToString(t)) return t;
  }
  throw FormatError("unknown boundary tag '" + s + "'");
}

nlohmann::json SubdomainToJson(const Subdomain &sd)
{
  nlohmann::json sides = nlohmann::json::array();
  for (fem::Side s : fem::kAllSides)
  {
    const auto &spec = sd.mesh.side(s);
    sides.push_back({{"side", fem::ToString(s)}, {"tag", fem::ToString(spec.tag)}, {"label", spec.label}});
  }
  nlohmann::json interfaces = nlohmann::json::array();
  for (const auto &b : sd.interfaces)
  {
    interfaces.push_back({{"neighbor", b.neighbor}, {"side", fem::ToString(b.side)}, {"nodes", b.nodes}});
  }
  return {{"id", sd.id},
          {"lower", {sd.rect.lower.x, sd.rect.lower.y}},
          {"upper", {sd.rect.upper.x, sd.rect.upper.y}},
          {"nx", sd.mesh.nx()},
          {"ny", sd.mesh.ny()},
          {"sides", sides},
          {"exterior_dirichlet_nodes", sd.exterior_dirichlet_nodes},
          {"interfaces", interfaces}};
}

Subdomain SubdomainFromJson(const nlohmann::json &j)
{
  Rectangle r{j.at("id").get<std::string>(),
              {j.at("lower").at(0).get<double>(), j.at("lower").at(1).get<double>()},
              {j.at("upper").at(0).get<double>(), j.at("upper").at(1).get<double>()}};
  std::array<fem::SideSpec, 4> specs;
  for (const auto &s : j.at("sides"))
  {
    const fem::Side side = fem::SideFromString(s.at("side").get<std::string>());
    specs[static_cast<int>(side)] = {TagFromString(s.at("tag").get<std::string>()),
                                     s.at("label").get<std::string>()};
  }
  const auto nx = j.at("nx").get<std::size_t>();
  const auto ny = j.at("ny").get<std::size_t>();
  if (nx == 0 || ny == 0 || !(r.upper.x > r.lower.x) || !(r.upper.y > r.lower.y))
  {
    throw FormatError("subdomain geometry is degenerate");
  }
  fem::StructuredMesh mesh(r.lower, {r.upper.x - r.lower.x, r.upper.y - r.lower.y}, nx, ny, specs);
  Subdomain sd{r.id, r, std::move(mesh), {}, {}};
  sd.exterior_dirichlet_nodes = j.at("exterior_dirichlet_nodes").get<std::vector<std::size_t>>();
  if (sd.exterior_dirichlet_nodes != sd.mesh.tagged_nodes(fem::BoundaryTag::ExteriorDirichlet))
  {
    throw FormatError("exterior Dirichlet nodes disagree with the stored side tags");
  }
  for (const auto &b : j.at("interfaces"))
  {
    InterfaceBlock block{b.at("neighbor").get<std::string>(),
                         fem::SideFromString(b.at("side").get<std::string>()),
                         b.at("nodes").get<std::vector<std::size_t>>()};
    for (std::size_t n : block.nodes)
    {
      if (n >= sd.mesh.num_nodes()) throw FormatError("interface node index out of range");
    }
    sd.interfaces.push_back(std::move(block));
  }
  return sd;
}

nlohmann::json StatsToJson(const SubproblemStats &s)
{
  return {{"index", s.index},
          {"modes_before", s.modes_before},
          {"modes_after", s.modes_after},
          {"compression_error", s.compression_error},
          {"compression_stagnated", s.compression_stagnated},
          {"unconverged_modes", s.unconverged_modes},
          {"fixed_point_iterations", s.fixed_point_iterations}};
}

SubproblemStats StatsFromJson(const nlohmann::json &j)
{
  SubproblemStats s;
  s.index = j.at("index").get<std::size_t>();
  s.modes_before = j.at("modes_before").get<std::size_t>();
  s.modes_after = j.at("modes_after").get<std::size_t>();
  s.compression_error = j.at("compression_error").get<double>();
  s.compression_stagnated = j.at("compression_stagnated").get<bool>();
  s.unconverged_modes = j.at("unconverged_modes").get<std::size_t>();
  s.fixed_point_iterations = j.at("fixed_point_iterations").get<std::size_t>();
  return s;
}

// Three grid points: both ends and the middle of every axis.
std::vector<std::vector<double>> ProbePoints(const separated::ParamGrid &grid)
{
  std::vector<std::vector<double>> out(3);
  for (const auto &a : grid.axes())
  {
    out[0].push_back(a.points().front());
    out[1].push_back(a.points()[a.size() / 2]);
    out[2].push_back(a.points().back());
  }
  return out;
}

}  // namespace

nlohmann::json ModelManifest(const SurrogateModel &model)
{
  nlohmann::json stats = nlohmann::json::array();
  for (const auto &s : model.stats) stats.push_back(StatsToJson(s));
  nlohmann::json tensors = nlohmann::json::array();
  tensors.push_back({{"name", "u0"}, {"doubles", separated::PayloadDoubles(model.u0)}});
  for (std::size_t q = 0; q < model.uq.size(); ++q)
  {
    tensors.push_back({{"name", "u" + std::to_string(q + 1)},
                       {"doubles", separated::PayloadDoubles(model.uq[q])}});
  }
  return {{"format", "ddpgd-model"},
          {"version", kModelFormatVersion},
          {"subdomain", SubdomainToJson(model.subdomain)},
          {"grid", separated::GridToJson(model.grid)},
          {"tolerances", {{"enrich", model.enrich_tol}, {"compress", model.compress_tol}}},
          {"seed", model.seed},
          {"modes", {{"before", model.ModesBefore()}, {"after", model.ModesAfter()}}},
          {"subproblems", stats},
          {"tensors", tensors}};
}

void WriteModel(std::ostream &os, const SurrogateModel &model)
{
  os.write(kMagic, sizeof(kMagic));
  io::WriteU64(os, kModelFormatVersion);
  io::WriteBlock(os, ModelManifest(model).dump());
  separated::WriteTensor(os, model.u0);
  for (const auto &t : model.uq) separated::WriteTensor(os, t);
  if (!os)
  {
    throw IoError("failed writing model data");
  }
}

SurrogateModel ReadModel(std::istream &is)
{
  char magic[sizeof(kMagic)] = {};
  if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
  {
    throw FormatError("not a model file (bad magic)");
  }
  const std::uint64_t version = io::ReadU64(is);
  if (version != kModelFormatVersion)
  {
    throw FormatError("unsupported model format version " + std::to_string(version) + " (expected " +
                      std::to_string(kModelFormatVersion) + ")");
  }
  nlohmann::json m;
  try
  {
    m = nlohmann::json::parse(io::ReadBlock(is, 1ULL << 28));
  }
  catch (const nlohmann::json::exception &e)
  {
    throw FormatError(std::string("corrupt payload: manifest is not valid JSON: ") + e.what());
  }
  try
  {
    if (m.at("format") != "ddpgd-model" || m.at("version").get<std::uint64_t>() != version)
    {
      throw FormatError("manifest does not describe a model");
    }
    Subdomain sd = SubdomainFromJson(m.at("subdomain"));
    separated::ParamGrid grid = separated::GridFromJson(m.at("grid"));
    SurrogateModel model{std::move(sd), std::move(grid), {}, {},
                         m.at("tolerances").at("enrich").get<double>(),
                         m.at("tolerances").at("compress").get<double>(),
                         m.at("seed").get<std::uint64_t>(), {}, 0.0};
    for (const auto &s : m.at("subproblems")) model.stats.push_back(StatsFromJson(s));

    const auto &tensors = m.at("tensors");
    if (tensors.size() != model.subdomain.interface_size() + 1)
    {
      throw FormatError("model declares " + std::to_string(tensors.size()) + " tensors for " +
                        std::to_string(model.subdomain.interface_size()) + " interface nodes");
    }
    for (std::size_t k = 0; k < tensors.size(); ++k)
    {
      auto t = separated::ReadTensor(is);
      if (separated::PayloadDoubles(t) != tensors[k].at("doubles").get<std::size_t>())
      {
        throw FormatError("corrupt payload: tensor " + std::to_string(k) + " length mismatch");
      }
      if (t.n_space() != model.subdomain.mesh.num_nodes() || !(t.grid() == model.grid))
      {
        throw FormatError("tensor " + std::to_string(k) + " does not match the model mesh or grid");
      }
      if (k == 0)
        model.u0 = std::move(t);
      else
        model.uq.push_back(std::move(t));
    }
    return model;
  }
  catch (const nlohmann::json::exception &e)
  {
    throw FormatError(std::string("malformed manifest: ") + e.what());
  }
}

void SaveModel(const SurrogateModel &model, const std::filesystem::path &path)
{
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os)
  {
    throw IoError("cannot open '" + path.string() + "' for writing");
  }
  WriteModel(os, model);
  os.close();
  if (!os)
  {
    throw IoError("failed writing '" + path.string() + "'");
  }
}

SurrogateModel LoadModel(const std::filesystem::path &path)
{
  std::ifstream is(path, std::ios::binary);
  if (!is)
  {
    throw IoError("cannot open '" + path.string() + "'");
  }
  SurrogateModel model = ReadModel(is);
  const double defect = TraceDefect(model, ProbePoints(model.grid));
  if (!(defect <= kTraceTolerance))
  {
    throw FormatError("model '" + path.string() + "' fails the trace check (defect " +
                      std::to_string(defect) + ")");
  }
  return model;
}

}  // namespace ddpgd::dd
