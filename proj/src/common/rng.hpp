// SPDX-License-Identifier: Apache-2.0

#ifndef DDPGD_COMMON_RNG_HPP
#define DDPGD_COMMON_RNG_HPP

#include <cstdint>
#include <random>
#include <string_view>

namespace ddpgd
{

// std::uniform_real_distribution is not specified bit-for-bit across standard libraries,
// so uniform draws are built directly from the 64-bit engine output.
class Rng
{
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1).
  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  std::uint64_t Next() { return engine_(); }

private:
  std::mt19937_64 engine_;
};

inline std::uint64_t SplitMix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stable seed for one offline subproblem: independent of scheduling order.
inline std::uint64_t SubproblemSeed(std::uint64_t base, std::string_view subdomain, std::uint64_t index)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : subdomain)
  {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return SplitMix64(SplitMix64(base ^ h) + index);
}

}  // namespace ddpgd

#endif  // DDPGD_COMMON_RNG_HPP
