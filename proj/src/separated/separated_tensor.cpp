// SPDX-License-Identifier: Apache-2.0

#include "separated/separated_tensor.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "common/error.hpp"
#include "common/rng.hpp"

namespace ddpgd::separated
{

namespace
{

double ParamDot(const ParamAxis &axis, std::span<const double> a, std::span<const double> b)
{
  const auto &w = axis.weights();
  double s = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j)
  {
    s += w[j] * a[j] * b[j];
  }
  return s;
}

// prod_d <a^d, b^d>_w, optionally skipping one axis.
double ParamProduct(const ParamGrid &grid, const std::vector<Vector> &a,
                    const std::vector<Vector> &b, std::size_t skip = static_cast<std::size_t>(-1))
{
  double p = 1.0;
  for (std::size_t d = 0; d < grid.dims(); ++d)
  {
    if (d != skip)
    {
      p *= ParamDot(grid.axis(d), a[d], b[d]);
    }
  }
  return p;
}

double ModeInner(const ParamGrid &grid, const Mode &a, const Mode &b, const SpatialNorm &norm)
{
  return norm.Dot(a.spatial, b.spatial) * ParamProduct(grid, a.parametric, b.parametric);
}

void CheckCompatible(const SeparatedTensor &a, const SeparatedTensor &b)
{
  if (a.n_space() != b.n_space() || !(a.grid() == b.grid()))
  {
    throw ArgumentError("separated tensors have different spatial size or grid");
  }
}

// Worst relative error over all collocation points of the parameter grid. Spatial vectors are
// expressed in an orthonormal basis of the source span, so each point costs O(rank).
class PointwiseTracker
{
 public:
  PointwiseTracker(const SeparatedTensor &t, const SpatialNorm &norm, std::size_t max_entries)
    : grid_(t.grid()), norm_(norm)
  {
    std::size_t points = 1;
    for (std::size_t d = 0; d < grid_.dims(); ++d)
    {
      points *= grid_.axis(d).size();
    }
    double peak = 0.0;
    for (const auto &m : t.modes())
    {
      peak = std::max(peak, std::sqrt(norm_.Dot(m.spatial, m.spatial)));
    }
    // Modified Gram-Schmidt with one re-orthogonalisation pass.
    for (const auto &m : t.modes())
    {
      Vector v = m.spatial;
      for (int pass = 0; pass < 2; ++pass)
      {
        for (const auto &q : basis_)
        {
          linalg::Axpy(-norm_.Dot(q, v), q, v);
        }
      }
      const double nv = std::sqrt(norm_.Dot(v, v));
      if (nv > 1e-13 * peak)
      {
        linalg::Scale(1.0 / nv, v);
        basis_.push_back(std::move(v));
      }
    }
    rank_ = basis_.size();
    if (rank_ == 0 || points > max_entries / rank_)
    {
      enabled_ = false;
      return;
    }
    points_ = points;
    target_.assign(points_ * rank_, 0.0);
    approx_.assign(points_ * rank_, 0.0);
    for (const auto &m : t.modes())
    {
      Accumulate(m, 1.0, target_);
    }
    scale_ = 0.0;
    for (std::size_t j = 0; j < points_; ++j)
    {
      scale_ = std::max(scale_, PointNorm(target_, j, nullptr));
    }
  }

  bool enabled() const { return enabled_; }

  void Set(const std::vector<Mode> &fitted)
  {
    std::fill(approx_.begin(), approx_.end(), 0.0);
    for (const auto &m : fitted)
    {
      Accumulate(m, 1.0, approx_);
    }
  }

  // max_j ||t(j) - t'(j)|| / ||t(j)||; points where t vanishes are measured against the peak.
  double MaxRelativeError() const
  {
    double worst = 0.0;
    const double floor = 1e-12 * scale_;
    for (std::size_t j = 0; j < points_; ++j)
    {
      const double r = PointNorm(target_, j, &approx_);
      const double n = PointNorm(target_, j, nullptr);
      worst = std::max(worst, r / std::max(n, floor));
    }
    return worst;
  }

 private:
  void Accumulate(const Mode &m, double sign, std::vector<double> &dst) const
  {
    Vector coords(rank_);
    for (std::size_t r = 0; r < rank_; ++r)
    {
      coords[r] = sign * norm_.Dot(basis_[r], m.spatial);
    }
    std::vector<std::size_t> idx(grid_.dims(), 0);
    for (std::size_t j = 0; j < points_; ++j)
    {
      double c = 1.0;
      for (std::size_t d = 0; d < grid_.dims(); ++d)
      {
        c *= m.parametric[d][idx[d]];
      }
      if (c != 0.0)
      {
        double *row = dst.data() + j * rank_;
        for (std::size_t r = 0; r < rank_; ++r)
        {
          row[r] += c * coords[r];
        }
      }
      for (std::size_t d = grid_.dims(); d-- > 0;)
      {
        if (++idx[d] < grid_.axis(d).size())
        {
          break;
        }
        idx[d] = 0;
      }
    }
  }

  double PointNorm(const std::vector<double> &a, std::size_t j, const std::vector<double> *b) const
  {
    double s = 0.0;
    for (std::size_t r = 0; r < rank_; ++r)
    {
      const double v = a[j * rank_ + r] - (b ? (*b)[j * rank_ + r] : 0.0);
      s += v * v;
    }
    return std::sqrt(s);
  }

  const ParamGrid &grid_;
  const SpatialNorm &norm_;
  std::vector<Vector> basis_;
  std::size_t rank_ = 0;
  std::size_t points_ = 0;
  bool enabled_ = true;
  double scale_ = 0.0;
  std::vector<double> target_;
  std::vector<double> approx_;
};

}  // namespace

SeparatedTensor::SeparatedTensor(std::size_t n_space, ParamGrid grid)
  : n_space_(n_space), grid_(std::move(grid))
{
}

void SeparatedTensor::AddMode(Mode mode)
{
  if (mode.spatial.size() != n_space_ || mode.parametric.size() != grid_.dims())
  {
    throw ArgumentError("mode does not match tensor shape");
  }
  for (std::size_t d = 0; d < grid_.dims(); ++d)
  {
    if (mode.parametric[d].size() != grid_.axis(d).size())
    {
      throw ArgumentError("parametric mode for axis '" + grid_.axis(d).name() +
                          "' has wrong length");
    }
  }
  modes_.push_back(std::move(mode));
}

Vector SeparatedTensor::Evaluate(std::span<const double> mu) const
{
  if (mu.size() != grid_.dims())
  {
    throw ArgumentError("Evaluate: expected " + std::to_string(grid_.dims()) + " parameters");
  }
  std::vector<std::pair<std::size_t, double>> loc;
  for (std::size_t d = 0; d < grid_.dims(); ++d)
  {
    loc.push_back(grid_.axis(d).Locate(mu[d]));
  }
  Vector out(n_space_, 0.0);
  for (const auto &m : modes_)
  {
    double c = 1.0;
    for (std::size_t d = 0; d < grid_.dims(); ++d)
    {
      const auto [k, t] = loc[d];
      const auto &p = m.parametric[d];
      c *= t == 0.0 ? p[k] : (t == 1.0 ? p[k + 1] : (1.0 - t) * p[k] + t * p[k + 1]);
    }
    linalg::Axpy(c, m.spatial, out);
  }
  return out;
}

Vector SeparatedTensor::EvaluateAtIndex(std::span<const std::size_t> index) const
{
  if (index.size() != grid_.dims())
  {
    throw ArgumentError("EvaluateAtIndex: wrong number of indices");
  }
  Vector out(n_space_, 0.0);
  for (const auto &m : modes_)
  {
    double c = 1.0;
    for (std::size_t d = 0; d < grid_.dims(); ++d)
    {
      c *= m.parametric[d].at(index[d]);
    }
    linalg::Axpy(c, m.spatial, out);
  }
  return out;
}

double SpatialNorm::Dot(std::span<const double> a, std::span<const double> b) const
{
  if (weights.empty())
  {
    return linalg::Dot(a, b);
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
  {
    s += weights[i] * a[i] * b[i];
  }
  return s;
}

double Inner(const SeparatedTensor &a, const SeparatedTensor &b, const SpatialNorm &norm)
{
  CheckCompatible(a, b);
  double s = 0.0;
  for (const auto &ma : a.modes())
  {
    for (const auto &mb : b.modes())
    {
      s += ModeInner(a.grid(), ma, mb, norm);
    }
  }
  return s;
}

double Norm(const SeparatedTensor &t, const SpatialNorm &norm)
{
  return std::sqrt(std::max(0.0, Inner(t, t, norm)));
}

SeparatedTensor Add(const SeparatedTensor &a, const SeparatedTensor &b)
{
  CheckCompatible(a, b);
  SeparatedTensor out = a;
  for (const auto &m : b.modes())
  {
    out.AddMode(m);
  }
  return out;
}

SeparatedTensor Scale(const SeparatedTensor &t, double c)
{
  SeparatedTensor out(t.n_space(), t.grid());
  for (auto m : t.modes())
  {
    linalg::Scale(c, m.spatial);
    out.AddMode(std::move(m));
  }
  return out;
}

void NormalizeMode(Mode &mode)
{
  for (auto &p : mode.parametric)
  {
    double peak = 0.0;
    for (double v : p)
    {
      if (std::abs(v) > std::abs(peak))
      {
        peak = v;
      }
    }
    if (peak == 0.0)
    {
      std::fill(mode.spatial.begin(), mode.spatial.end(), 0.0);
      for (auto &q : mode.parametric)
      {
        std::fill(q.begin(), q.end(), q.empty() ? 0.0 : 1.0);
      }
      return;
    }
    linalg::Scale(1.0 / peak, p);
    linalg::Scale(peak, mode.spatial);
  }
}

namespace
{

// Inner products between the source modes and the fitted modes, kept per axis so that one
// factor can be left out during the joint update.
struct FitProducts
{
  std::vector<std::vector<double>> ss;               // <s_m, f_k>, M x K
  std::vector<std::vector<double>> ff;               // <f_k, f_l>, K x K
  std::vector<std::vector<std::vector<double>>> ps;  // per axis <psi_m, phi_k>, M x K
  std::vector<std::vector<std::vector<double>>> pf;  // per axis <phi_k, phi_l>, K x K
};

FitProducts Products(const ParamGrid &grid, const std::vector<Mode> &source,
                     const std::vector<Mode> &fitted, const SpatialNorm &norm)
{
  const std::size_t M = source.size(), K = fitted.size(), D = grid.dims();
  FitProducts p;
  p.ss.assign(M, std::vector<double>(K));
  p.ff.assign(K, std::vector<double>(K));
  p.ps.assign(D, std::vector<std::vector<double>>(M, std::vector<double>(K)));
  p.pf.assign(D, std::vector<std::vector<double>>(K, std::vector<double>(K)));
  for (std::size_t k = 0; k < K; ++k)
  {
    for (std::size_t m = 0; m < M; ++m)
    {
      p.ss[m][k] = norm.Dot(source[m].spatial, fitted[k].spatial);
      for (std::size_t d = 0; d < D; ++d)
      {
        p.ps[d][m][k] = ParamDot(grid.axis(d), source[m].parametric[d], fitted[k].parametric[d]);
      }
    }
    for (std::size_t l = 0; l <= k; ++l)
    {
      p.ff[k][l] = p.ff[l][k] = norm.Dot(fitted[k].spatial, fitted[l].spatial);
      for (std::size_t d = 0; d < D; ++d)
      {
        p.pf[d][k][l] = p.pf[d][l][k] =
          ParamDot(grid.axis(d), fitted[k].parametric[d], fitted[l].parametric[d]);
      }
    }
  }
  return p;
}

// ||t||^2 - 2 <t, f> + ||f||^2 from the stored products.
double ResidualSquared(double total, const FitProducts &p)
{
  const std::size_t M = p.ss.size(), K = p.ff.size(), D = p.ps.size();
  double r2 = total;
  for (std::size_t m = 0; m < M; ++m)
  {
    for (std::size_t k = 0; k < K; ++k)
    {
      double c = p.ss[m][k];
      for (std::size_t d = 0; d < D; ++d) c *= p.ps[d][m][k];
      r2 -= 2.0 * c;
    }
  }
  for (std::size_t k = 0; k < K; ++k)
  {
    for (std::size_t l = 0; l < K; ++l)
    {
      double c = p.ff[k][l];
      for (std::size_t d = 0; d < D; ++d) c *= p.pf[d][k][l];
      r2 += c;
    }
  }
  return r2;
}

// Minimum-norm solution of the small dense system A X = B (A is K x K, B is K x cols).
Eigen::MatrixXd SmallSolve(const Eigen::MatrixXd &A, const Eigen::MatrixXd &B)
{
  return Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(A).solve(B);
}

// One sweep of alternating least squares over all fitted modes jointly: every spatial vector,
// then every parametric factor axis by axis.
void JointSweep(const ParamGrid &grid, const std::vector<Mode> &source, std::vector<Mode> &fitted,
                const SpatialNorm &norm)
{
  const std::size_t M = source.size(), K = fitted.size(), D = grid.dims();
  const std::size_t n = source.front().spatial.size();
  FitProducts p = Products(grid, source, fitted, norm);

  // Spatial vectors: G S^T = C^T with G_kl = prod_d <phi_k, phi_l>, C = sum_m s_m prod_d <psi_m, phi_k>.
  Eigen::MatrixXd G(K, K), W(K, M);
  for (std::size_t k = 0; k < K; ++k)
  {
    for (std::size_t l = 0; l < K; ++l)
    {
      double g = 1.0;
      for (std::size_t d = 0; d < D; ++d) g *= p.pf[d][k][l];
      G(k, l) = g;
    }
    for (std::size_t m = 0; m < M; ++m)
    {
      double w = 1.0;
      for (std::size_t d = 0; d < D; ++d) w *= p.ps[d][m][k];
      W(k, m) = w;
    }
  }
  const Eigen::MatrixXd coef = SmallSolve(G, W);  // K x M
  for (std::size_t k = 0; k < K; ++k)
  {
    Vector v(n, 0.0);
    for (std::size_t m = 0; m < M; ++m) linalg::Axpy(coef(k, m), source[m].spatial, v);
    fitted[k].spatial = std::move(v);
  }
  for (std::size_t k = 0; k < K; ++k)
  {
    for (std::size_t m = 0; m < M; ++m) p.ss[m][k] = norm.Dot(source[m].spatial, fitted[k].spatial);
    for (std::size_t l = 0; l <= k; ++l)
    {
      p.ff[k][l] = p.ff[l][k] = norm.Dot(fitted[k].spatial, fitted[l].spatial);
    }
  }

  for (std::size_t d = 0; d < D; ++d)
  {
    Eigen::MatrixXd A(K, K), C(K, M);
    for (std::size_t k = 0; k < K; ++k)
    {
      for (std::size_t l = 0; l < K; ++l)
      {
        double a = p.ff[k][l];
        for (std::size_t e = 0; e < D; ++e)
          if (e != d) a *= p.pf[e][k][l];
        A(k, l) = a;
      }
      for (std::size_t m = 0; m < M; ++m)
      {
        double c = p.ss[m][k];
        for (std::size_t e = 0; e < D; ++e)
          if (e != d) c *= p.ps[e][m][k];
        C(k, m) = c;
      }
    }
    const Eigen::MatrixXd X = SmallSolve(A, C);  // K x M
    const std::size_t N = grid.axis(d).size();
    for (std::size_t k = 0; k < K; ++k)
    {
      Vector f(N, 0.0);
      for (std::size_t m = 0; m < M; ++m) linalg::Axpy(X(k, m), source[m].parametric[d], f);
      fitted[k].parametric[d] = std::move(f);
    }
    for (std::size_t k = 0; k < K; ++k)
    {
      for (std::size_t m = 0; m < M; ++m)
      {
        p.ps[d][m][k] = ParamDot(grid.axis(d), source[m].parametric[d], fitted[k].parametric[d]);
      }
      for (std::size_t l = 0; l <= k; ++l)
      {
        p.pf[d][k][l] = p.pf[d][l][k] =
          ParamDot(grid.axis(d), fitted[k].parametric[d], fitted[l].parametric[d]);
      }
    }
  }
  for (auto &m : fitted) NormalizeMode(m);
}

// Rank-one alternating least squares fit of t - sum(fitted), started from a seeded random guess.
Mode RankOneFit(const SeparatedTensor &t, const std::vector<Mode> &fitted, const SpatialNorm &norm,
                const CompressOptions &opts, bool &converged)
{
  const ParamGrid &grid = t.grid();
  const std::size_t D = grid.dims();
  const auto &source = t.modes();
  Rng rng(opts.seed + fitted.size());
  Mode cand;
  cand.spatial.assign(t.n_space(), 0.0);
  for (std::size_t d = 0; d < D; ++d)
  {
    Vector f(grid.axis(d).size());
    for (double &v : f) v = rng.Uniform(0.5, 1.5);
    cand.parametric.push_back(std::move(f));
  }

  converged = false;
  Mode prev;
  for (std::size_t it = 0; it < opts.als_max_iters; ++it)
  {
    // Spatial update.
    const double ff = ParamProduct(grid, cand.parametric, cand.parametric);
    Vector R(t.n_space(), 0.0);
    for (const auto &m : source)
    {
      linalg::Axpy(ParamProduct(grid, m.parametric, cand.parametric) / ff, m.spatial, R);
    }
    for (const auto &m : fitted)
    {
      linalg::Axpy(-ParamProduct(grid, m.parametric, cand.parametric) / ff, m.spatial, R);
    }
    cand.spatial = std::move(R);
    const double rr = norm.Dot(cand.spatial, cand.spatial);
    if (rr == 0.0)
    {
      break;
    }

    // Parametric updates, one axis at a time.
    for (std::size_t d = 0; d < D; ++d)
    {
      const double denom = rr * ParamProduct(grid, cand.parametric, cand.parametric, d);
      Vector f(grid.axis(d).size(), 0.0);
      for (const auto &m : source)
      {
        const double c = norm.Dot(cand.spatial, m.spatial) *
                         ParamProduct(grid, m.parametric, cand.parametric, d) / denom;
        linalg::Axpy(c, m.parametric[d], f);
      }
      for (const auto &m : fitted)
      {
        const double c = norm.Dot(cand.spatial, m.spatial) *
                         ParamProduct(grid, m.parametric, cand.parametric, d) / denom;
        linalg::Axpy(-c, m.parametric[d], f);
      }
      cand.parametric[d] = std::move(f);
    }
    NormalizeMode(cand);

    const double cc = ModeInner(grid, cand, cand, norm);
    if (cc == 0.0)
    {
      break;
    }
    if (it > 0)
    {
      const double diff2 = cc + ModeInner(grid, prev, prev, norm) - 2.0 * ModeInner(grid, cand, prev, norm);
      if (std::sqrt(std::max(0.0, diff2)) <= opts.als_tol * std::sqrt(cc))
      {
        converged = true;
        break;
      }
    }
    prev = cand;
  }
  return cand;
}

}  // namespace

CompressResult Compress(const SeparatedTensor &t, double tol, const SpatialNorm &norm,
                        const CompressOptions &opts)
{
  if (!(tol > 0.0))
  {
    throw ArgumentError("Compress: tolerance must be positive");
  }
  const ParamGrid &grid = t.grid();
  const std::size_t M = t.num_modes();
  CompressResult result{SeparatedTensor(t.n_space(), grid)};

  double total = 0.0;
  for (std::size_t a = 0; a < M; ++a)
  {
    for (std::size_t b = 0; b < M; ++b)
    {
      total += ModeInner(grid, t.mode(a), t.mode(b), norm);
    }
  }
  if (M == 0 || !(total > 0.0))
  {
    return result;
  }
  const double target = tol * std::sqrt(total);

  const auto &source = t.modes();
  std::vector<Mode> fitted;
  double residual = std::sqrt(total);

  std::optional<PointwiseTracker> pointwise;
  double worst = 0.0;
  if (opts.pointwise)
  {
    pointwise.emplace(t, norm, opts.pointwise_max_entries);
    if (pointwise->enabled())
    {
      worst = pointwise->MaxRelativeError();
    }
    else
    {
      pointwise.reset();
    }
  }
  const auto done = [&] { return residual <= target && (!pointwise || worst <= tol); };

  while (!done() && fitted.size() < M)
  {
    bool converged = false;
    Mode cand = RankOneFit(t, fitted, norm, opts, converged);
    if (!converged)
    {
      result.stagnated = true;
    }
    if (norm.Dot(cand.spatial, cand.spatial) == 0.0)
    {
      break;
    }
    fitted.push_back(std::move(cand));

    double r2 = ResidualSquared(total, Products(grid, source, fitted, norm));
    for (std::size_t sweep = 0; sweep < opts.update_sweeps && fitted.size() > 1; ++sweep)
    {
      std::vector<Mode> trial = fitted;
      JointSweep(grid, source, trial, norm);
      const double r2_new = ResidualSquared(total, Products(grid, source, trial, norm));
      if (!(r2_new < r2))
      {
        break;
      }
      const double gain = (r2 - r2_new) / std::max(r2, 1e-300);
      fitted = std::move(trial);
      r2 = r2_new;
      if (gain < opts.update_tol)
      {
        break;
      }
    }
    residual = std::sqrt(std::max(0.0, r2));
    if (pointwise)
    {
      pointwise->Set(fitted);
      worst = pointwise->MaxRelativeError();
    }
  }

  result.pointwise_checked = pointwise.has_value();
  if (!done())
  {
    // Greedy re-approximation could not do better than the input rank.
    result.tensor = t;
    result.relative_error = 0.0;
    result.kept_input = true;
    return result;
  }
  for (auto &m : fitted)
  {
    result.tensor.AddMode(std::move(m));
  }
  result.relative_error = residual / std::sqrt(total);
  result.max_pointwise_error = pointwise ? worst : 0.0;
  return result;
}

}  // namespace ddpgd::separated
