// SPDX-License-Identifier: Apache-2.0

#include "linalg/gmres.hpp"

#include <cmath>
#include <limits>

#include "common/error.hpp"

namespace ddpgd::linalg
{

const char *ToString(GmresStatus status)
{
  switch (status)
  {
    case GmresStatus::Converged:
      return "converged";
    case GmresStatus::MaxIterations:
      return "max_iterations";
    case GmresStatus::Breakdown:
      return "breakdown";
  }
  return "unknown";
}

namespace
{

// Solve the leading k x k upper triangular part of H y = g (H stored by columns).
Vector BackSubstitute(const std::vector<Vector> &H, const Vector &g, std::size_t k)
{
  Vector y(k, 0.0);
  for (std::size_t ii = k; ii-- > 0;)
  {
    double s = g[ii];
    for (std::size_t j = ii + 1; j < k; ++j)
    {
      s -= H[j][ii] * y[j];
    }
    y[ii] = s / H[ii][ii];
  }
  return y;
}

}  // namespace

GmresResult Gmres(const LinearOperator &apply, std::span<const double> b, const GmresConfig &cfg)
{
  if (!(cfg.rel_tol > 0.0) || cfg.max_iters < 1 || (cfg.restart && *cfg.restart < 1))
  {
    throw ArgumentError("Gmres: rel_tol must be positive and max_iters, restart at least 1");
  }
  const std::size_t n = b.size();
  GmresResult result;
  result.x.assign(n, 0.0);
  const double bnorm = Norm2(b);
  if (bnorm == 0.0)
  {
    return result;
  }

  const std::size_t m = cfg.restart.value_or(cfg.max_iters);
  Vector r(n), w(n);
  bool breakdown = false;

  while (true)
  {
    // r = b - A x
    if (result.iterations == 0)
    {
      r.assign(b.begin(), b.end());
    }
    else
    {
      apply(result.x, w);
      for (std::size_t i = 0; i < n; ++i)
      {
        r[i] = b[i] - w[i];
      }
    }
    const double beta = Norm2(r);
    result.final_relative_residual = beta / bnorm;
    if (result.final_relative_residual <= cfg.rel_tol)
    {
      result.status = GmresStatus::Converged;
      return result;
    }
    if (breakdown)
    {
      result.status = GmresStatus::Breakdown;
      return result;
    }
    if (result.iterations >= cfg.max_iters)
    {
      result.status = GmresStatus::MaxIterations;
      return result;
    }

    std::vector<Vector> V;
    std::vector<Vector> H;  // column j has j+2 entries
    Vector cs, sn, g{beta};
    V.emplace_back(r);
    Scale(1.0 / beta, V[0]);

    std::size_t k = 0;
    while (k < m && result.iterations < cfg.max_iters)
    {
      apply(V[k], w);
      ++result.iterations;
      const double wnorm0 = Norm2(w);

      Vector h(k + 2, 0.0);
      for (int pass = 0; pass < 2; ++pass)
      {
        for (std::size_t i = 0; i <= k; ++i)
        {
          const double hij = Dot(w, V[i]);
          h[i] += hij;
          Axpy(-hij, V[i], w);
        }
      }
      h[k + 1] = Norm2(w);

      for (std::size_t i = 0; i < k; ++i)
      {
        const double t = cs[i] * h[i] + sn[i] * h[i + 1];
        h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1];
        h[i] = t;
      }
      const double denom = std::hypot(h[k], h[k + 1]);
      const double c = denom == 0.0 ? 1.0 : h[k] / denom;
      const double s = denom == 0.0 ? 0.0 : h[k + 1] / denom;
      cs.push_back(c);
      sn.push_back(s);
      const double hk1 = h[k + 1];
      h[k] = c * h[k] + s * h[k + 1];
      h[k + 1] = 0.0;
      g.push_back(-s * g[k]);
      g[k] = c * g[k];
      H.push_back(std::move(h));
      ++k;

      const double estimate = std::abs(g[k]) / bnorm;
      result.residual_history.push_back(estimate);

      if (hk1 <= 1e2 * std::numeric_limits<double>::epsilon() * wnorm0 || H.back()[k - 1] == 0.0)
      {
        breakdown = true;
        break;
      }
      if (estimate <= cfg.rel_tol)
      {
        break;
      }
      V.emplace_back(w);
      Scale(1.0 / hk1, V.back());
    }

    // A zero pivot means the Krylov space became invariant with a singular projection.
    std::size_t usable = k;
    while (usable > 0 && H[usable - 1][usable - 1] == 0.0)
    {
      --usable;
    }
    const Vector y = BackSubstitute(H, g, usable);
    for (std::size_t j = 0; j < usable; ++j)
    {
      Axpy(y[j], V[j], result.x);
    }
  }
}

}  // namespace ddpgd::linalg
