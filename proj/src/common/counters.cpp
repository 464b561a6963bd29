// SPDX-License-Identifier: Apache-2.0

#include "common/counters.hpp"

#include <atomic>

namespace ddpgd::counters
{

namespace
{
std::atomic<std::uint64_t> assembly_count{0};
std::atomic<std::uint64_t> factorization_count{0};
}  // namespace

void CountAssembly()
{
  assembly_count.fetch_add(1, std::memory_order_relaxed);
}

void CountFactorization()
{
  factorization_count.fetch_add(1, std::memory_order_relaxed);
}

Snapshot Read()
{
  return {assembly_count.load(std::memory_order_relaxed),
          factorization_count.load(std::memory_order_relaxed)};
}

}  // namespace ddpgd::counters
