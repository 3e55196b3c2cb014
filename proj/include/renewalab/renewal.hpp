#pragma once

#include <functional>

#include "renewalab/core.hpp"
#include "renewalab/geometry.hpp"
#include "renewalab/markov.hpp"
#include "renewalab/parallel.hpp"

namespace renewalab {

// ---------------------------------------------------------------------------
// Direction functions a(tau) = tau m + sqrt(tau) b(tau), b(tau) -> frak_A.
// ---------------------------------------------------------------------------
struct DirectionFunction {
  Vec m;
  Vec frak_A;
  std::function<Vec(double)> b;  // defaults to the constant frak_A

  DirectionFunction(Vec m_, Vec frak_A_, std::function<Vec(double)> b_ = nullptr)
      : m(std::move(m_)), frak_A(std::move(frak_A_)), b(std::move(b_)) {
    if (frak_A.size() != m.size()) throw std::invalid_argument("DirectionFunction: dimension mismatch");
    if (!b) {
      const Vec a = frak_A;
      b = [a](double) { return a; };
    }
  }
};

inline Vec direction_eval(const DirectionFunction& dir, double tau) {
  if (tau <= 0) throw std::invalid_argument("direction_eval: tau must be positive");
  return tau * dir.m + std::sqrt(tau) * dir.b(tau);
}

// ---------------------------------------------------------------------------
// Target sets with closed-form Lebesgue measure and null boundary.
// ---------------------------------------------------------------------------
struct TargetSet {
  enum class Kind { box, ball };

  Kind kind;
  Vec center;
  Vec half_widths;  // box
  double radius = 0;  // ball

  static TargetSet box(Vec center, Vec half_widths) {
    if (center.size() != half_widths.size() || half_widths.minCoeff() < 0)
      throw std::invalid_argument("TargetSet::box: invalid extents");
    TargetSet s;
    s.kind = Kind::box;
    s.center = std::move(center);
    s.half_widths = std::move(half_widths);
    return s;
  }

  static TargetSet ball(Vec center, double radius) {
    if (radius < 0) throw std::invalid_argument("TargetSet::ball: negative radius");
    TargetSet s;
    s.kind = Kind::ball;
    s.center = std::move(center);
    s.radius = radius;
    return s;
  }

  int dim() const { return int(center.size()); }

  bool contains(const Vec& x) const {
    if (kind == Kind::box) {
      for (int i = 0; i < x.size(); ++i)
        if (std::abs(x(i) - center(i)) > half_widths(i)) return false;
      return true;
    }
    return (x - center).norm() <= radius;
  }

  double lebesgue() const {
    if (kind == Kind::box) {
      double v = 1;
      for (int i = 0; i < half_widths.size(); ++i) v *= 2.0 * half_widths(i);
      return v;
    }
    const int d = dim();
    return std::pow(pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0) * std::pow(radius, d);
  }

  /// max ||x|| over the set (distance of the farthest point from the origin).
  double circumradius() const {
    if (kind == Kind::box) return (center.cwiseAbs() + half_widths).norm();
    return center.norm() + radius;
  }
};

// ---------------------------------------------------------------------------
// The limiting constant of the renewal theorem:
//   C = L0 * det S / ||S m|| * exp((<Sm,SA>^2 - ||Sm||^2 ||SA||^2)/(2||Sm||^2)),
// with S = Sigma^{-1/2}. The exponent is <= 0 by Cauchy-Schwarz, with
// equality iff S frak_A is parallel to S m (in particular frak_A = 0).
// ---------------------------------------------------------------------------
inline double renewal_constant(double L0, const Vec& m, const SymPosDef& sigma, const Vec& frak_A) {
  if (m.norm() == 0) throw std::invalid_argument("renewal_constant: zero drift");
  if (L0 <= 0) throw std::invalid_argument("renewal_constant: L0 must be positive");
  const Mat s = sigma.inv_sqrt();
  const Vec sm = s * m;
  const Vec sa = s * frak_A;
  const double det_s = 1.0 / std::sqrt(sigma.det());
  const double dot = sm.dot(sa);
  const double expo = (dot * dot - sm.squaredNorm() * sa.squaredNorm()) / (2.0 * sm.squaredNorm());
  return L0 * det_s / sm.norm() * std::exp(std::min(0.0, expo));
}

// ---------------------------------------------------------------------------
// Truncation horizon: smallest N with
//   tau ||m|| + r_eff + margin * sqrt(lambda_max(Sigma - m m^T) N) < N ||m||,
// where r_eff folds the set circumradius and the sqrt(tau) b(tau) offset of
// the direction function. Visits past N then require a deviation of at least
// `margin` standard deviations of the dispersion part.
// ---------------------------------------------------------------------------
template <class Model>
int truncation_horizon(const Model& model, double tau, const TargetSet& a_set,
                       const DirectionFunction& dir, double margin_sigmas = 12.0) {
  const Vec m = mean_vector(model);
  const double nm = m.norm();
  const auto lrs = longrun_sigma(model);
  Eigen::SelfAdjointEigenSolver<Mat> es(lrs.sigma_c);
  const double lmax = std::max(0.0, es.eigenvalues().maxCoeff());
  const double r_eff = a_set.circumradius() + (direction_eval(dir, tau) - tau * m).norm();
  const double rhs = tau * nm + r_eff;
  // root of ||m|| s^2 - margin sqrt(lmax) s - rhs = 0 in s = sqrt(N)
  const double b = margin_sigmas * std::sqrt(lmax);
  const double s = (b + std::sqrt(b * b + 4.0 * nm * rhs)) / (2.0 * nm);
  return int(std::ceil(s * s)) + 1;
}

// ---------------------------------------------------------------------------
// Monte Carlo renewal measure.
// ---------------------------------------------------------------------------
struct RenewalEstimate {
  double tau;
  double v_hat;        // (2 pi tau)^{(d-1)/2} * mean path visit count
  double std_err;      // same scaling, path-level variance
  double raw_total;    // sum over paths of f-weighted visit counts
  double theory;       // C * L_d(A)
  std::int64_t n_paths;
  int n_max;
  std::uint64_t seed;
};

namespace detail {

struct ChunkStat {
  double sum = 0;
  double sum_sq = 0;
};

template <class Model, class WeightFn>
ChunkStat renewal_chunk(const Model& model, const WeightFn& weight, const TargetSet& a_set,
                        const Vec& shift, int n_max, std::uint64_t seed, std::int64_t begin,
                        std::int64_t end) {
  ChunkStat st;
  for (std::int64_t p = begin; p < end; ++p) {
    Rng rng(seed, std::uint64_t(p));
    double count = 0;
    if constexpr (std::is_same_v<Model, FiniteChain>) {
      int s = model.sample_initial(rng);
      Vec sum = Vec::Zero(model.dim());
      for (int n = 1; n <= n_max; ++n) {
        s = model.sample_next(s, rng);
        sum += model.xi.row(s).transpose();
        if (a_set.contains(sum - shift)) count += weight(s);
      }
    } else {
      Vec x = model.sample_initial(rng);
      Vec sum = Vec::Zero(model.dim());
      for (int n = 1; n <= n_max; ++n) {
        x = model.step(x, rng);
        sum += x;
        if (a_set.contains(sum - shift)) count += 1.0;
      }
    }
    st.sum += count;
    st.sum_sq += count * count;
  }
  return st;
}

}  // namespace detail

/// Raw truncated renewal sum estimator (no scaling, no lattice refusal):
/// mean over paths of sum_{n<=n_trunc} f(X_n) 1_A(S_n - shift), with the
/// path-level standard error. Exposed for oracle comparisons.
template <class Model>
std::pair<double, double> mc_renewal_sum(const Model& model, const TargetSet& a_set, const Vec& shift,
                                         int n_trunc, std::int64_t n_paths, std::uint64_t seed,
                                         int workers = 0, std::int64_t chunk = 4096) {
  if (workers <= 0) workers = default_workers();
  auto weight = [&](int s) {
    if constexpr (std::is_same_v<Model, FiniteChain>) return model.f(s);
    else return 1.0;
  };
  auto stats = map_chunks<detail::ChunkStat>(n_paths, chunk, workers, [&](std::int64_t, std::int64_t b,
                                                                          std::int64_t e) {
    return detail::renewal_chunk(model, weight, a_set, shift, n_trunc, seed, b, e);
  });
  double total = 0, total_sq = 0;
  for (const auto& st : stats) {
    total += st.sum;
    total_sq += st.sum_sq;
  }
  const double mean = total / double(n_paths);
  const double var = std::max(0.0, total_sq / double(n_paths) - mean * mean);
  const double se = std::sqrt(var / double(n_paths));
  return {mean, se};
}

/// Full estimator of V_tau(A), scaled by (2 pi tau)^{(d-1)/2}. Finite chains
/// flagged as lattice by the spectral diagnostic are refused (the weak limit
/// does not hold for them); Gaussian AR models are nonlattice by
/// construction, and the degenerate zero-noise variant is admitted as a
/// deterministic test model.
template <class Model>
RenewalEstimate mc_renewal_measure(const Model& model, const TargetSet& a_set, const DirectionFunction& dir,
                                   double tau, std::int64_t n_paths, std::uint64_t seed, int workers = 0,
                                   double margin_sigmas = 12.0) {
  if (n_paths < 100) throw std::invalid_argument("mc_renewal_measure: path budget below 100");
  if constexpr (std::is_same_v<Model, FiniteChain>) {
    const auto rep = nonlattice_diagnostic(model, 2.0 * pi + 0.5);
    if (rep.lattice_evidence)
      throw std::runtime_error("mc_renewal_measure: lattice evidence in the spectral diagnostic, refused");
  }
  const int d = model.dim();
  const Vec m = mean_vector(model);
  const int n_max = truncation_horizon(model, tau, a_set, dir, margin_sigmas);
  const Vec shift = direction_eval(dir, tau);

  if (workers <= 0) workers = default_workers();
  auto weight = [&](int s) {
    if constexpr (std::is_same_v<Model, FiniteChain>) return model.f(s);
    else return 1.0;
  };
  auto stats = map_chunks<detail::ChunkStat>(n_paths, 4096, workers, [&](std::int64_t, std::int64_t b,
                                                                         std::int64_t e) {
    return detail::renewal_chunk(model, weight, a_set, shift, n_max, seed, b, e);
  });
  double total = 0, total_sq = 0;
  for (const auto& st : stats) {
    total += st.sum;
    total_sq += st.sum_sq;
  }
  const double scale = std::pow(2.0 * pi * tau, 0.5 * (d - 1));
  const double mean = total / double(n_paths);
  const double var = std::max(0.0, total_sq / double(n_paths) - mean * mean);

  RenewalEstimate est;
  est.tau = tau;
  est.raw_total = total;
  est.v_hat = scale * mean;
  est.std_err = scale * std::sqrt(var / double(n_paths));
  est.n_paths = n_paths;
  est.n_max = n_max;
  est.seed = seed;

  const auto lrs = longrun_sigma(model);
  double L0 = 1.0;
  if constexpr (std::is_same_v<Model, FiniteChain>) L0 = stationary_dist(model).dot(model.f);
  if (lrs.positive_definite) {
    est.theory = renewal_constant(L0, m, SymPosDef(lrs.sigma), dir.frak_A) * a_set.lebesgue();
  } else {
    est.theory = std::numeric_limits<double>::quiet_NaN();
  }
  return est;
}

template <class Model>
std::vector<RenewalEstimate> convergence_study(const Model& model, const TargetSet& a_set,
                                               const DirectionFunction& dir, const std::vector<double>& taus,
                                               std::int64_t n_paths, std::uint64_t seed, int workers = 0,
                                               double margin_sigmas = 12.0) {
  std::vector<RenewalEstimate> rows;
  rows.reserve(taus.size());
  for (double tau : taus)
    rows.push_back(mc_renewal_measure(model, a_set, dir, tau, n_paths, seed, workers, margin_sigmas));
  return rows;
}

}  // namespace renewalab
