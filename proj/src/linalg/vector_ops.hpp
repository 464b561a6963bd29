// SPDX-License-Identifier: Apache-2.0

#ifndef DDPGD_LINALG_VECTOR_OPS_HPP
#define DDPGD_LINALG_VECTOR_OPS_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace ddpgd::linalg
{

using Vector = std::vector<double>;

inline double Dot(std::span<const double> a, std::span<const double> b)
{
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
  {
    s += a[i] * b[i];
  }
  return s;
}

inline double Norm2(std::span<const double> a)
{
  return std::sqrt(Dot(a, a));
}

inline double NormInf(std::span<const double> a)
{
  double m = 0.0;
  for (double v : a)
  {
    m = std::max(m, std::abs(v));
  }
  return m;
}

// y += alpha * x
inline void Axpy(double alpha, std::span<const double> x, std::span<double> y)
{
  for (std::size_t i = 0; i < x.size(); ++i)
  {
    y[i] += alpha * x[i];
  }
}

inline void Scale(double alpha, std::span<double> x)
{
  for (double &v : x)
  {
    v *= alpha;
  }
}

}  // namespace ddpgd::linalg

#endif  // DDPGD_LINALG_VECTOR_OPS_HPP
