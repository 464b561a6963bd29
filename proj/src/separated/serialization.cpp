// SPDX-License-Identifier: Apache-2.0

#include "separated/serialization.hpp"

#include "common/binary_io.hpp"
#include "common/error.hpp"

namespace ddpgd::separated
{

nlohmann::json GridToJson(const ParamGrid &grid)
{
  nlohmann::json axes = nlohmann::json::array();
  for (const auto &a : grid.axes())
  {
    axes.push_back({{"name", a.name()},
                    {"lower", a.lower()},
                    {"upper", a.upper()},
                    {"step", a.step()},
                    {"points", a.size()}});
  }
  return axes;
}

ParamGrid GridFromJson(const nlohmann::json &j)
{
  std::vector<ParamAxis> axes;
  for (const auto &a : j)
  {
    ParamAxis axis(a.at("name").get<std::string>(), a.at("lower").get<double>(),
                   a.at("upper").get<double>(), a.at("step").get<double>());
    if (axis.size() != a.at("points").get<std::size_t>())
    {
      throw FormatError("grid axis '" + axis.name() + "': point count mismatch");
    }
    axes.push_back(std::move(axis));
  }
  return ParamGrid(std::move(axes));
}

std::size_t PayloadDoubles(const SeparatedTensor &t)
{
  std::size_t per_mode = t.n_space();
  for (const auto &a : t.grid().axes())
  {
    per_mode += a.size();
  }
  return per_mode * t.num_modes();
}

void WriteTensor(std::ostream &os, const SeparatedTensor &t)
{
  const nlohmann::json header = {
    {"n_space", t.n_space()}, {"n_modes", t.num_modes()}, {"axes", GridToJson(t.grid())}};
  io::WriteBlock(os, header.dump());
  for (const auto &m : t.modes())
  {
    io::WriteDoubles(os, m.spatial);
    for (const auto &p : m.parametric)
    {
      io::WriteDoubles(os, p);
    }
  }
  if (!os)
  {
    throw IoError("failed writing tensor payload");
  }
}

SeparatedTensor ReadTensor(std::istream &is)
{
  nlohmann::json header;
  try
  {
    header = nlohmann::json::parse(io::ReadBlock(is, 1ULL << 26));
  }
  catch (const nlohmann::json::exception &e)
  {
    throw FormatError(std::string("corrupt tensor header: ") + e.what());
  }
  try
  {
    const auto n_space = header.at("n_space").get<std::size_t>();
    const auto n_modes = header.at("n_modes").get<std::size_t>();
    SeparatedTensor t(n_space, GridFromJson(header.at("axes")));
    for (std::size_t m = 0; m < n_modes; ++m)
    {
      Mode mode;
      mode.spatial.resize(n_space);
      io::ReadDoubles(is, mode.spatial);
      for (const auto &a : t.grid().axes())
      {
        Vector p(a.size());
        io::ReadDoubles(is, p);
        mode.parametric.push_back(std::move(p));
      }
      t.AddMode(std::move(mode));
    }
    return t;
  }
  catch (const nlohmann::json::exception &e)
  {
    throw FormatError(std::string("corrupt tensor header: ") + e.what());
  }
}

}  // namespace ddpgd::separated
