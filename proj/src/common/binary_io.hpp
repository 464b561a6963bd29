// SPDX-License-Identifier: Apache-2.0

#ifndef DDPGD_COMMON_BINARY_IO_HPP
#define DDPGD_COMMON_BINARY_IO_HPP

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "common/error.hpp"

namespace ddpgd::io
{

// Little-endian encoding regardless of the host byte order.
template <typename T>
T ToLittle(T v)
{
  if constexpr (std::endian::native == std::endian::big)
  {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i)
    {
      std::swap(b[i], b[sizeof(T) - 1 - i]);
    }
    std::memcpy(&v, b, sizeof(T));
  }
  return v;
}

inline void WriteU64(std::ostream &os, std::uint64_t v)
{
  v = ToLittle(v);
  os.write(reinterpret_cast<const char *>(&v), sizeof(v));
}

inline std::uint64_t ReadU64(std::istream &is)
{
  std::uint64_t v = 0;
  if (!is.read(reinterpret_cast<char *>(&v), sizeof(v)))
  {
    throw FormatError("corrupt payload: unexpected end of data");
  }
  return ToLittle(v);
}

inline void WriteDoubles(std::ostream &os, std::span<const double> data)
{
  if constexpr (std::endian::native == std::endian::little)
  {
    os.write(reinterpret_cast<const char *>(data.data()),
             static_cast<std::streamsize>(data.size() * sizeof(double)));
  }
  else
  {
    for (double d : data)
    {
      const double le = ToLittle(d);
      os.write(reinterpret_cast<const char *>(&le), sizeof(le));
    }
  }
}

inline void ReadDoubles(std::istream &is, std::span<double> out)
{
  if (!is.read(reinterpret_cast<char *>(out.data()),
               static_cast<std::streamsize>(out.size() * sizeof(double))))
  {
    throw FormatError("corrupt payload: unexpected end of data");
  }
  if constexpr (std::endian::native == std::endian::big)
  {
    for (double &d : out)
    {
      d = ToLittle(d);
    }
  }
}

inline void WriteBlock(std::ostream &os, const std::string &text)
{
  WriteU64(os, text.size());
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
}

inline std::string ReadBlock(std::istream &is, std::uint64_t max_len = (1ULL << 30))
{
  const std::uint64_t n = ReadU64(is);
  if (n > max_len)
  {
    throw FormatError("corrupt payload: block length out of range");
  }
  std::string s(n, '\0');
  if (!is.read(s.data(), static_cast<std::streamsize>(n)))
  {
    throw FormatError("corrupt payload: unexpected end of data");
  }
  return s;
}

}  // namespace ddpgd::io

#endif  // DDPGD_COMMON_BINARY_IO_HPP
