// SPDX-License-Identifier: Apache-2.0

#ifndef DDPGD_COMMON_COUNTERS_HPP
#define DDPGD_COMMON_COUNTERS_HPP

#include <cstdint>

namespace ddpgd::counters
{

// Process-wide tallies of FEM work. The online phase must leave both untouched.
struct Snapshot
{
  std::uint64_t assemblies = 0;
  std::uint64_t factorizations = 0;
};

void CountAssembly();
void CountFactorization();
Snapshot Read();

inline Snapshot Delta(const Snapshot &before, const Snapshot &after)
{
  return {after.assemblies - before.assemblies, after.factorizations - before.factorizations};
}

}  // namespace ddpgd::counters

#endif  // DDPGD_COMMON_COUNTERS_HPP
