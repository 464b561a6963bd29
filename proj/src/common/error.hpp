// SPDX-License-Identifier: Apache-2.0

#ifndef DDPGD_COMMON_ERROR_HPP
#define DDPGD_COMMON_ERROR_HPP

#include <stdexcept>
#include <string>

namespace ddpgd
{

// Error categories. Values match the C API status codes and the CLI exit codes.
enum class ErrorKind : int
{
  Config = 2,
  Solver = 3,
  Io = 4,
  Domain = 5,
  Format = 6,
  Argument = 7,
  Internal = 8
};

class Error : public std::runtime_error
{
public:
  Error(ErrorKind kind, const std::string &what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

struct ConfigError : Error
{
  explicit ConfigError(const std::string &what) : Error(ErrorKind::Config, what) {}
};

struct SolverError : Error
{
  explicit SolverError(const std::string &what) : Error(ErrorKind::Solver, what) {}
};

struct IoError : Error
{
  explicit IoError(const std::string &what) : Error(ErrorKind::Io, what) {}
};

struct DomainError : Error
{
  explicit DomainError(const std::string &what) : Error(ErrorKind::Domain, what) {}
};

struct FormatError : Error
{
  explicit FormatError(const std::string &what) : Error(ErrorKind::Format, what) {}
};

struct ArgumentError : Error
{
  explicit ArgumentError(const std::string &what) : Error(ErrorKind::Argument, what) {}
};

}  // namespace ddpgd

#endif  // DDPGD_COMMON_ERROR_HPP
