// SPDX-License-Identifier: Apache-2.0

#ifndef DDPGD_DD_MODEL_IO_HPP
#define DDPGD_DD_MODEL_IO_HPP

#include <filesystem>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "dd/offline.hpp"

namespace ddpgd::dd
{

inline constexpr std::uint64_t kModelFormatVersion = 1;

// Layout: 8-byte magic "DDPGDMDL", u64 version, u64 manifest length, JSON manifest, then one
// tensor blob per entry of manifest["tensors"] (u0 first, then uq in trace order).
void WriteModel(std::ostream &os, const SurrogateModel &model);
SurrogateModel ReadModel(std::istream &is);

void SaveModel(const SurrogateModel &model, const std::filesystem::path &path);
// Validates geometry consistency and the trace property at three grid points.
SurrogateModel LoadModel(const std::filesystem::path &path);

// Manifest without tensor data (also used in build reports).
nlohmann::json ModelManifest(const SurrogateModel &model);

}  // namespace ddpgd::dd

#endif  // DDPGD_DD_MODEL_IO_HPP
