// SPDX-License-Identifier: Apache-2.0

#ifndef DDPGD_SEPARATED_SERIALIZATION_HPP
#define DDPGD_SEPARATED_SERIALIZATION_HPP

#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "separated/separated_tensor.hpp"

namespace ddpgd::separated
{

// Tensor blob: u64 header length, JSON header {n_space, n_modes, axes}, then for each mode
// the spatial vector followed by one vector per axis, all little-endian float64.
void WriteTensor(std::ostream &os, const SeparatedTensor &t);
SeparatedTensor ReadTensor(std::istream &is);

nlohmann::json GridToJson(const ParamGrid &grid);
ParamGrid GridFromJson(const nlohmann::json &j);

// Number of float64 values a tensor blob carries.
std::size_t PayloadDoubles(const SeparatedTensor &t);

}  // namespace ddpgd::separated

#endif  // DDPGD_SEPARATED_SERIALIZATION_HPP
