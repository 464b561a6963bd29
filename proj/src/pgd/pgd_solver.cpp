// SPDX-License-Identifier: Apache-2.0

#include "pgd/pgd_solver.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "fem/assembly.hpp"
#include "linalg/spd_solver.hpp"

namespace ddpgd::pgd
{

namespace
{

using Factors = std::vector<Vector>;

void CheckFactors(const ParamGrid &grid, const Factors &f, const char *what)
{
  if (f.size() != grid.dims())
  {
    throw ArgumentError(std::string(what) + ": need one parametric factor per grid axis");
  }
  for (std::size_t d = 0; d < grid.dims(); ++d)
  {
    if (f[d].size() != grid.axis(d).size())
    {
      throw ArgumentError(std::string(what) + ": parametric factor has wrong length on axis '" +
                          grid.axis(d).name() + "'");
    }
  }
}

class Integrator
{
public:
  explicit Integrator(const ParamGrid &grid) : grid_(grid) {}

  double Dot(std::size_t d, const Vector &a, const Vector &b) const
  {
    const auto &w = grid_.axis(d).weights();
    double s = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * a[j] * b[j];
    return s;
  }

  double Dot(std::size_t d, const Vector &a, const Vector &b, const Vector &c) const
  {
    const auto &w = grid_.axis(d).weights();
    double s = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * a[j] * b[j] * c[j];
    return s;
  }

  // prod over axes except `skip` of <a, F>
  double Product(const Factors &a, const Factors &F, std::size_t skip = kNone) const
  {
    double p = 1.0;
    for (std::size_t d = 0; d < grid_.dims(); ++d)
    {
      if (d != skip) p *= Dot(d, a[d], F[d]);
    }
    return p;
  }

  // prod over axes except `skip` of <a, b, F>
  double Product(const Factors &a, const Factors &b, const Factors &F,
                 std::size_t skip = kNone) const
  {
    double p = 1.0;
    for (std::size_t d = 0; d < grid_.dims(); ++d)
    {
      if (d != skip) p *= Dot(d, a[d], b[d], F[d]);
    }
    return p;
  }

  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

private:
  const ParamGrid &grid_;
};

struct ReducedMode
{
  Vector spatial;
  Factors parametric;
};

// Cholesky factors keyed by the operator weights up to a common scale.
class FactorCache
{
public:
  Vector Solve(const std::vector<linalg::SparseMatrix> &ops, const std::vector<double> &coeffs,
               const Vector &rhs)
  {
    const double scale = coeffs.front();
    std::vector<double> key(coeffs.size());
    for (std::size_t k = 0; k < coeffs.size(); ++k) key[k] = coeffs[k] / scale;
    if (!factor_ || key != key_)
    {
      std::vector<const linalg::SparseMatrix *> mats;
      for (const auto &m : ops) mats.push_back(&m);
      factor_ = std::make_unique<linalg::SpdFactorization>(linalg::LinearCombination(key, mats));
      key_ = std::move(key);
    }
    Vector x = factor_->Solve(rhs);
    linalg::Scale(1.0 / scale, x);
    return x;
  }

private:
  std::vector<double> key_;
  std::unique_ptr<linalg::SpdFactorization> factor_;
};

}  // namespace

double Amplitude(const separated::Mode &mode)
{
  double a = linalg::Norm2(mode.spatial);
  for (const auto &p : mode.parametric)
  {
    a *= linalg::NormInf(p);
  }
  return a;
}

separated::Mode HatLift(std::size_t n_space, std::size_t node, const ParamGrid &grid)
{
  separated::Mode m;
  m.spatial.assign(n_space, 0.0);
  m.spatial.at(node) = 1.0;
  for (const auto &a : grid.axes())
  {
    m.parametric.emplace_back(a.size(), 1.0);
  }
  return m;
}

SeparatedTensor WithLift(const SeparatedTensor &homogeneous,
                         const std::optional<separated::Mode> &lift)
{
  if (!lift)
  {
    return homogeneous;
  }
  SeparatedTensor out(homogeneous.n_space(), homogeneous.grid());
  out.AddMode(*lift);
  for (const auto &m : homogeneous.modes())
  {
    out.AddMode(m);
  }
  return out;
}

AssembledProblem Assemble(const SeparatedProblem &p)
{
  if (p.mesh == nullptr)
  {
    throw ArgumentError("SeparatedProblem: no mesh");
  }
  AssembledProblem a;
  a.grid = p.grid;
  a.n_space = p.mesh->num_nodes();
  a.fixed_nodes = p.fixed_zero_nodes;
  a.lift = p.lift;
  for (const auto &t : p.diffusion)
  {
    a.operators.push_back(fem::AssembleStiffness(*p.mesh, t.spatial));
    a.operator_factors.push_back(t.factors);
  }
  for (const auto &t : p.source)
  {
    a.loads.push_back(fem::AssembleLoad(*p.mesh, t.spatial));
    a.load_factors.push_back(t.factors);
  }
  for (const auto &t : p.neumann)
  {
    a.loads.push_back(fem::AssembleNeumann(*p.mesh, t.spatial, t.label));
    a.load_factors.push_back(t.factors);
  }
  return a;
}

PgdResult Solve(const SeparatedProblem &p, const PgdConfig &cfg)
{
  return Solve(Assemble(p), cfg);
}

PgdResult Solve(const AssembledProblem &p, const PgdConfig &cfg)
{
  if (!(cfg.enrich_tol > 0.0) || !(cfg.fp_tol > 0.0) || cfg.max_modes < 1 ||
      cfg.fp_max_iters < 1)
  {
    throw ArgumentError("PgdConfig: tolerances and iteration limits must be positive");
  }
  if (p.operators.empty())
  {
    throw ConfigError("PGD problem needs at least one diffusion term");
  }
  const ParamGrid &grid = p.grid;
  const std::size_t D = grid.dims();
  for (std::size_t k = 0; k < p.operators.size(); ++k)
  {
    CheckFactors(grid, p.operator_factors[k], "diffusion term");
    if (p.operators[k].rows() != p.n_space)
    {
      throw ArgumentError("diffusion operator size does not match the mesh");
    }
    for (const auto &f : p.operator_factors[k])
    {
      if (!(*std::min_element(f.begin(), f.end()) > 0.0))
      {
        throw ConfigError("diffusion parametric factors must be strictly positive on the grid");
      }
    }
  }
  for (const auto &f : p.load_factors)
  {
    CheckFactors(grid, f, "load term");
  }
  if (p.lift)
  {
    CheckFactors(grid, p.lift->parametric, "Dirichlet lift");
  }

  const auto free = fem::FreeNodes(p.n_space, p.fixed_nodes);
  const std::size_t nf = free.size();
  PgdResult result{SeparatedTensor(p.n_space, grid), {}, 0, 0};

  std::vector<linalg::SparseMatrix> K;
  for (const auto &op : p.operators)
  {
    K.push_back(op.Extract(free, free));
  }
  const auto restrict_free = [&free](const Vector &full)
  {
    Vector r(free.size());
    for (std::size_t i = 0; i < free.size(); ++i) r[i] = full[free[i]];
    return r;
  };

  // Loads on free nodes, including -K_k * lift moved to the right-hand side.
  std::vector<Vector> b;
  std::vector<Factors> beta;
  const auto push_load = [&](Vector v, Factors f)
  {
    const bool zero_vec = std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
    const bool zero_fac = std::any_of(f.begin(), f.end(), [](const Vector &q)
                                      { return std::all_of(q.begin(), q.end(),
                                                           [](double x) { return x == 0.0; }); });
    if (!zero_vec && !zero_fac)
    {
      b.push_back(std::move(v));
      beta.push_back(std::move(f));
    }
  };
  for (std::size_t l = 0; l < p.loads.size(); ++l)
  {
    if (p.loads[l].size() != p.n_space)
    {
      throw ArgumentError("load vector size does not match the mesh");
    }
    push_load(restrict_free(p.loads[l]), p.load_factors[l]);
  }
  if (p.lift)
  {
    for (std::size_t k = 0; k < p.operators.size(); ++k)
    {
      Vector v = restrict_free(p.operators[k] * p.lift->spatial);
      linalg::Scale(-1.0, v);
      Factors f = p.operator_factors[k];
      for (std::size_t d = 0; d < D; ++d)
      {
        for (std::size_t j = 0; j < f[d].size(); ++j) f[d][j] *= p.lift->parametric[d][j];
      }
      push_load(std::move(v), std::move(f));
    }
  }
  if (b.empty() || nf == 0)
  {
    return result;
  }

  const std::size_t nk = K.size();
  const std::size_t nl = b.size();
  const auto &alpha = p.operator_factors;
  const Integrator integ(grid);
  FactorCache cache;

  std::vector<ReducedMode> modes;
  std::vector<std::vector<Vector>> KV;  // KV[m][k] = K_k V_m
  double first_amplitude = 0.0;

  for (std::size_t n = 0; n < cfg.max_modes; ++n)
  {
    Rng rng(SplitMix64(cfg.seed) + n);
    ReducedMode cand;
    for (std::size_t d = 0; d < D; ++d)
    {
      Vector f(grid.axis(d).size());
      for (double &v : f) v = rng.Uniform(0.5, 1.5);
      cand.parametric.push_back(std::move(f));
    }

    ReducedMode prev;
    bool converged = false;
    std::vector<Vector> KR(nk);
    std::size_t it = 0;
    cand.spatial.assign(nf, 0.0);
    for (; it < cfg.fp_max_iters; ++it)
    {
      // Spatial update: parametrically weighted FE solve against the current residual.
      std::vector<double> c(nk);
      for (std::size_t k = 0; k < nk; ++k)
      {
        c[k] = integ.Product(alpha[k], cand.parametric, cand.parametric);
      }
      Vector rhs(nf, 0.0);
      for (std::size_t l = 0; l < nl; ++l)
      {
        linalg::Axpy(integ.Product(beta[l], cand.parametric), b[l], rhs);
      }
      for (std::size_t m = 0; m < modes.size(); ++m)
      {
        for (std::size_t k = 0; k < nk; ++k)
        {
          linalg::Axpy(-integ.Product(alpha[k], modes[m].parametric, cand.parametric), KV[m][k],
                       rhs);
        }
      }
      cand.spatial = cache.Solve(K, c, rhs);
      for (std::size_t k = 0; k < nk; ++k)
      {
        KR[k] = K[k] * cand.spatial;
      }

      // Parametric updates: pointwise algebraic solve at each collocation point.
      std::vector<double> rKr(nk), rb(nl);
      std::vector<std::vector<double>> rKV(modes.size(), std::vector<double>(nk));
      for (std::size_t k = 0; k < nk; ++k) rKr[k] = linalg::Dot(cand.spatial, KR[k]);
      for (std::size_t l = 0; l < nl; ++l) rb[l] = linalg::Dot(cand.spatial, b[l]);
      for (std::size_t m = 0; m < modes.size(); ++m)
      {
        for (std::size_t k = 0; k < nk; ++k) rKV[m][k] = linalg::Dot(cand.spatial, KV[m][k]);
      }
      for (std::size_t d = 0; d < D; ++d)
      {
        const std::size_t np = grid.axis(d).size();
        Vector num(np, 0.0), den(np, 0.0);
        for (std::size_t k = 0; k < nk; ++k)
        {
          const double s = rKr[k] * integ.Product(alpha[k], cand.parametric, cand.parametric, d);
          linalg::Axpy(s, alpha[k][d], den);
        }
        for (std::size_t l = 0; l < nl; ++l)
        {
          const double s = rb[l] * integ.Product(beta[l], cand.parametric, d);
          linalg::Axpy(s, beta[l][d], num);
        }
        for (std::size_t m = 0; m < modes.size(); ++m)
        {
          const auto &phi = modes[m].parametric[d];
          for (std::size_t k = 0; k < nk; ++k)
          {
            const double s =
              rKV[m][k] * integ.Product(alpha[k], modes[m].parametric, cand.parametric, d);
            const auto &a = alpha[k][d];
            for (std::size_t j = 0; j < np; ++j) num[j] -= s * a[j] * phi[j];
          }
        }
        Vector f(np);
        for (std::size_t j = 0; j < np; ++j)
        {
          f[j] = den[j] > 0.0 ? num[j] / den[j] : 0.0;
        }
        cand.parametric[d] = std::move(f);
      }

      separated::Mode tmp{std::move(cand.spatial), std::move(cand.parametric)};
      separated::NormalizeMode(tmp);
      cand.spatial = std::move(tmp.spatial);
      cand.parametric = std::move(tmp.parametric);

      const double rr = linalg::Dot(cand.spatial, cand.spatial);
      if (rr == 0.0)
      {
        break;
      }
      if (it > 0)
      {
        double self = rr, other = linalg::Dot(prev.spatial, prev.spatial),
               cross = linalg::Dot(cand.spatial, prev.spatial);
        for (std::size_t d = 0; d < D; ++d)
        {
          self *= integ.Dot(d, cand.parametric[d], cand.parametric[d]);
          other *= integ.Dot(d, prev.parametric[d], prev.parametric[d]);
          cross *= integ.Dot(d, cand.parametric[d], prev.parametric[d]);
        }
        const double change = std::sqrt(std::max(0.0, self + other - 2.0 * cross));
        if (change <= cfg.fp_tol * std::sqrt(self))
        {
          converged = true;
          ++it;
          break;
        }
      }
      prev = cand;
    }
    result.fixed_point_iterations += it;
    if (!converged)
    {
      ++result.unconverged_modes;
    }

    separated::Mode full;
    full.spatial.assign(p.n_space, 0.0);
    if (!cand.spatial.empty())
    {
      for (std::size_t i = 0; i < nf; ++i) full.spatial[free[i]] = cand.spatial[i];
    }
    full.parametric = cand.parametric;
    const double amp = Amplitude(full);
    if (n == 0)
    {
      if (!(amp > 0.0))
      {
        throw SolverError("PGD: first mode has zero amplitude although the data is nonzero");
      }
      first_amplitude = amp;
    }
    else if (!(amp > 0.0))
    {
      break;
    }
    result.amplitudes.push_back(amp);
    result.homogeneous.AddMode(std::move(full));
    KV.emplace_back(nk);
    for (std::size_t k = 0; k < nk; ++k) KV.back()[k] = K[k] * cand.spatial;
    modes.push_back(std::move(cand));
    if (amp < cfg.enrich_tol * first_amplitude)
    {
      break;
    }
  }
  return result;
}

}  // namespace ddpgd::pgd
