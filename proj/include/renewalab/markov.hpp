#pragma once

#include <optional>

#include "renewalab/core.hpp"
#include "renewalab/geometry.hpp"
#include "renewalab/rng.hpp"

namespace renewalab {

// ---------------------------------------------------------------------------
// Finite-state Markov chain with a per-state additive increment xi in R^d.
// ---------------------------------------------------------------------------
struct FiniteChain {
  Mat P;    // n x n row-stochastic
  Mat xi;   // n x d, one increment vector per state
  Vec mu;   // initial distribution
  Vec f;    // nonnegative per-state weight, defaults to all-ones

  FiniteChain(Mat P_, Mat xi_, Vec mu_, std::optional<Vec> f_ = std::nullopt)
      : P(std::move(P_)), xi(std::move(xi_)), mu(std::move(mu_)) {
    const int n = int(P.rows());
    if (P.cols() != n) throw std::invalid_argument("FiniteChain: P not square");
    if (xi.rows() != n) throw std::invalid_argument("FiniteChain: xi must have one row per state");
    if (mu.size() != n) throw std::invalid_argument("FiniteChain: mu size mismatch");
    for (int i = 0; i < n; ++i) {
      if (std::abs(P.row(i).sum() - 1.0) > 1e-12)
        throw std::invalid_argument("FiniteChain: row " + std::to_string(i) + " of P does not sum to 1");
      if (P.row(i).minCoeff() < 0) throw std::invalid_argument("FiniteChain: negative transition probability");
    }
    if (std::abs(mu.sum() - 1.0) > 1e-12 || mu.minCoeff() < 0)
      throw std::invalid_argument("FiniteChain: mu is not a probability vector");
    f = f_ ? *f_ : Vec::Ones(n);
    if (f.size() != n || f.minCoeff() < 0) throw std::invalid_argument("FiniteChain: invalid weight vector f");
    cum_ = Mat(n, n);
    for (int i = 0; i < n; ++i) {
      double c = 0;
      for (int j = 0; j < n; ++j) {
        c += P(i, j);
        cum_(i, j) = c;
      }
      cum_(i, n - 1) = 1.0;
    }
    cum_mu_.resize(n);
    double c = 0;
    for (int j = 0; j < n; ++j) {
      c += mu(j);
      cum_mu_(j) = c;
    }
    cum_mu_(n - 1) = 1.0;
  }

  int n_states() const { return int(P.rows()); }
  int dim() const { return int(xi.cols()); }

  int sample_initial(Rng& rng) const { return pick(cum_mu_, rng.uniform()); }
  int sample_next(int s, Rng& rng) const { return pick(cum_.row(s), rng.uniform()); }

private:
  template <class Row>
  static int pick(const Row& cum, double u) {
    int j = 0;
    while (j + 1 < cum.size() && u > cum(j)) ++j;
    return j;
  }
  Mat cum_;     // row-wise cumulative transition probabilities
  Vec cum_mu_;
};

// ---------------------------------------------------------------------------
// Gaussian AR(1) iterative model X_n = A X_{n-1} + noise, xi(x) = x.
// ---------------------------------------------------------------------------
struct ARModel {
  enum class Start { stationary, point_mass };

  Mat A;
  Vec noise_mean;
  Mat noise_cov;
  Start start = Start::stationary;
  Vec x0;  // used when start == point_mass

  ARModel(Mat A_, Vec mean_, Mat cov_, Start start_ = Start::stationary, Vec x0_ = {})
      : A(std::move(A_)), noise_mean(std::move(mean_)), noise_cov(std::move(cov_)), start(start_), x0(std::move(x0_)) {
    const int d = int(A.rows());
    if (A.cols() != d || noise_mean.size() != d || noise_cov.rows() != d || noise_cov.cols() != d)
      throw std::invalid_argument("ARModel: dimension mismatch");
    if ((noise_cov - noise_cov.transpose()).norm() > 1e-12 * (1 + noise_cov.norm()))
      throw std::invalid_argument("ARModel: noise covariance not symmetric");
    if (operator_norm() >= 1.0) throw std::invalid_argument("ARModel: ||A|| >= 1, not strictly contractive");
    if (start == Start::point_mass && x0.size() != d) throw std::invalid_argument("ARModel: x0 size mismatch");
    noise_chol_ = psd_sqrt(noise_cov);
    stat_mean_ = (Mat::Identity(d, d) - A).partialPivLu().solve(noise_mean);
    stat_chol_ = psd_sqrt(stationary_cov());
  }

  int dim() const { return int(A.rows()); }

  double operator_norm() const { return A.jacobiSvd().singularValues()(0); }

  /// Solves G = A G A^T + noise_cov (discrete Lyapunov equation).
  Mat stationary_cov() const {
    const int d = dim();
    Mat k = Mat::Identity(d * d, d * d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int p = 0; p < d; ++p)
          for (int q = 0; q < d; ++q) k(i + d * j, p + d * q) -= A(i, p) * A(j, q);
    Vec rhs(d * d);
    for (int p = 0; p < d; ++p)
      for (int q = 0; q < d; ++q) rhs(p + d * q) = noise_cov(p, q);
    Vec g = k.partialPivLu().solve(rhs);
    Mat G(d, d);
    for (int p = 0; p < d; ++p)
      for (int q = 0; q < d; ++q) G(p, q) = g(p + d * q);
    return 0.5 * (G + G.transpose());
  }

  Vec stationary_mean() const { return stat_mean_; }

  Vec sample_initial(Rng& rng) const {
    if (start == Start::point_mass) return x0;
    return stat_mean_ + stat_chol_ * rng.gaussian_vec(dim());
  }

  Vec step(const Vec& x, Rng& rng) const { return A * x + noise_mean + noise_chol_ * rng.gaussian_vec(dim()); }

private:
  Mat noise_chol_;
  Vec stat_mean_;
  Mat stat_chol_;
};

// ---------------------------------------------------------------------------
// Trajectories: states (chain) or points (AR), with partial sums S_0 = 0,
// S_n - S_{n-1} = xi(X_n).
// ---------------------------------------------------------------------------
struct Trajectory {
  std::vector<int> states;      // finite chain only, X_0..X_N
  std::vector<Vec> points;      // AR model only, X_0..X_N
  std::vector<Vec> sums;        // S_0..S_N
};

// ---------------------------------------------------------------------------
// Stationary distribution and ergodicity.
// ---------------------------------------------------------------------------
inline bool is_ergodic(const FiniteChain& chain) {
  const int n = chain.n_states();
  Mat q = chain.P;
  for (int it = 1; it <= n * n; ++it) {
    if (q.minCoeff() > 0) return true;
    q = q * chain.P;
  }
  return false;
}

/// Invariant probability vector, solved from the null space of (P^T - I)
/// with the normalization row appended.
inline Vec stationary_dist(const FiniteChain& chain) {
  if (!is_ergodic(chain))
    throw std::runtime_error("stationary_dist: chain is not ergodic (no strictly positive power of P)");
  const int n = chain.n_states();
  Mat a = chain.P.transpose() - Mat::Identity(n, n);
  a.row(n - 1).setOnes();
  Vec b = Vec::Zero(n);
  b(n - 1) = 1.0;
  Vec pi = a.partialPivLu().solve(b);
  const double resid = (pi.transpose() * chain.P - pi.transpose()).norm();
  if (resid > 1e-10) throw std::runtime_error("stationary_dist: residual too large");
  return pi;
}

// ---------------------------------------------------------------------------
// Drift vector.
// ---------------------------------------------------------------------------
inline Vec mean_vector(const FiniteChain& chain) {
  const Vec pi = stationary_dist(chain);
  Vec m = chain.xi.transpose() * pi;
  if (m.norm() < 1e-14)
    throw std::runtime_error("mean_vector: drift is zero (centered case not covered)");
  return m;
}

inline Vec mean_vector(const ARModel& model) {
  Vec m = model.stationary_mean();
  if (m.norm() < 1e-14)
    throw std::runtime_error("mean_vector: drift is zero (centered case not covered)");
  return m;
}

// ---------------------------------------------------------------------------
// Long-run covariance Sigma = m m^T + lim (1/n) E[S_{n,c} S_{n,c}^T].
// ---------------------------------------------------------------------------
struct LongRunSigma {
  Mat sigma;
  Mat sigma_c;              // dispersion part (Sigma - m m^T)
  bool positive_definite;   // nonlattice prerequisite; false flags degeneracy
};

/// Finite chain: dispersion via the fundamental matrix Z = (I - P + 1 pi^T)^{-1},
/// Sigma_c = Xi_c^T (D_pi Z + Z^T D_pi - D_pi) Xi_c with Xi_c the centered
/// increments.
inline LongRunSigma longrun_sigma(const FiniteChain& chain) {
  const int n = chain.n_states();
  const Vec pi = stationary_dist(chain);
  const Vec m = chain.xi.transpose() * pi;
  Mat xi_c = chain.xi;
  xi_c.rowwise() -= m.transpose();
  const Mat z = (Mat::Identity(n, n) - chain.P + Vec::Ones(n) * pi.transpose()).partialPivLu().solve(
      Mat::Identity(n, n));
  const Mat dpi = pi.asDiagonal();
  Mat core = dpi * z + z.transpose() * dpi - dpi;
  Mat sigma_c = xi_c.transpose() * core * xi_c;
  sigma_c = 0.5 * (sigma_c + sigma_c.transpose());
  LongRunSigma out;
  out.sigma_c = sigma_c;
  out.sigma = m * m.transpose() + sigma_c;
  Eigen::SelfAdjointEigenSolver<Mat> es(out.sigma);
  out.positive_definite = es.eigenvalues().minCoeff() > 1e-12 * std::max(1.0, es.eigenvalues().maxCoeff());
  return out;
}

/// AR model: G0 solves the discrete Lyapunov equation, and the lag sums give
/// Lambda = (I-A)^{-1} G0 + G0 (I-A^T)^{-1} - G0.
inline LongRunSigma longrun_sigma(const ARModel& model) {
  const int d = model.dim();
  const Vec m = model.stationary_mean();
  const Mat g0 = model.stationary_cov();
  const Mat inv = (Mat::Identity(d, d) - model.A).partialPivLu().solve(Mat::Identity(d, d));
  Mat lambda = inv * g0 + g0 * inv.transpose() - g0;
  lambda = 0.5 * (lambda + lambda.transpose());
  LongRunSigma out;
  out.sigma_c = lambda;
  out.sigma = m * m.transpose() + lambda;
  Eigen::SelfAdjointEigenSolver<Mat> es(out.sigma);
  out.positive_definite = es.eigenvalues().minCoeff() > 1e-12 * std::max(1.0, es.eigenvalues().maxCoeff());
  return out;
}

// ---------------------------------------------------------------------------
// Simulation. Streams are keyed by (seed, path index); simulate_path is the
// materialized single-path variant used by tests and diagnostics.
// ---------------------------------------------------------------------------
inline Trajectory simulate_path(const FiniteChain& chain, int n_max, std::uint64_t seed,
                                std::uint64_t path_index = 0) {
  if (n_max < 1) throw std::invalid_argument("simulate_path: n_max >= 1 required");
  Rng rng(seed, path_index);
  Trajectory tr;
  tr.states.reserve(n_max + 1);
  tr.sums.reserve(n_max + 1);
  int s = chain.sample_initial(rng);
  tr.states.push_back(s);
  Vec sum = Vec::Zero(chain.dim());
  tr.sums.push_back(sum);
  for (int n = 1; n <= n_max; ++n) {
    s = chain.sample_next(s, rng);
    tr.states.push_back(s);
    sum += chain.xi.row(s).transpose();
    tr.sums.push_back(sum);
  }
  return tr;
}

inline Trajectory simulate_path(const ARModel& model, int n_max, std::uint64_t seed,
                                std::uint64_t path_index = 0) {
  if (n_max < 1) throw std::invalid_argument("simulate_path: n_max >= 1 required");
  Rng rng(seed, path_index);
  Trajectory tr;
  tr.points.reserve(n_max + 1);
  tr.sums.reserve(n_max + 1);
  Vec x = model.sample_initial(rng);
  tr.points.push_back(x);
  Vec sum = Vec::Zero(model.dim());
  tr.sums.push_back(sum);
  for (int n = 1; n <= n_max; ++n) {
    x = model.step(x, rng);
    tr.points.push_back(x);
    sum += x;
    tr.sums.push_back(sum);
  }
  return tr;
}

// ---------------------------------------------------------------------------
// Nonlattice diagnostic: spectral radius of the twisted transition matrix
// over a frequency grid. Evidence only, not a decision procedure.
// ---------------------------------------------------------------------------
struct NonlatticeReport {
  bool lattice_evidence = false;
  double max_offzero_radius = 0;      // max spectral radius over t != 0
  std::vector<Vec> flagged;           // t with spectral radius >= 1 - 1e-9
};

inline CMat twisted_matrix(const FiniteChain& chain, const Vec& t) {
  const int n = chain.n_states();
  CMat m(n, n);
  for (int y = 0; y < n; ++y) {
    const cplx phase = std::exp(cplx(0, t.dot(chain.xi.row(y))));
    for (int x = 0; x < n; ++x) m(x, y) = chain.P(x, y) * phase;
  }
  return m;
}

inline double spectral_radius(const CMat& m) {
  Eigen::ComplexEigenSolver<CMat> es(m, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Axis-aligned grid over the closed ball B(0, radius), step chosen so that
/// 2*pi is a grid point whenever radius >= 2*pi (integer-valued increments
/// are then always caught).
inline std::vector<Vec> frequency_grid(int d, double radius, double step = pi / 2) {
  std::vector<Vec> out;
  const int kmax = int(std::floor(radius / step + 1e-12));
  std::vector<int> idx(d, -kmax);
  while (true) {
    Vec t(d);
    for (int i = 0; i < d; ++i) t(i) = idx[i] * step;
    if (t.norm() <= radius + 1e-12 && t.norm() > 0) out.push_back(t);
    int i = 0;
    for (; i < d; ++i) {
      if (++idx[i] <= kmax) break;
      idx[i] = -kmax;
    }
    if (i == d) break;
  }
  return out;
}

inline NonlatticeReport nonlattice_diagnostic(const FiniteChain& chain, const std::vector<Vec>& t_grid) {
  if (!is_ergodic(chain)) throw std::runtime_error("nonlattice_diagnostic: chain is not ergodic");
  NonlatticeReport rep;
  for (const Vec& t : t_grid) {
    if (t.norm() == 0) continue;
    const double r = spectral_radius(twisted_matrix(chain, t));
    rep.max_offzero_radius = std::max(rep.max_offzero_radius, r);
    if (r >= 1.0 - 1e-9) {
      rep.lattice_evidence = true;
      rep.flagged.push_back(t);
    }
  }
  return rep;
}

inline NonlatticeReport nonlattice_diagnostic(const FiniteChain& chain, double radius) {
  return nonlattice_diagnostic(chain, frequency_grid(chain.dim(), radius));
}

/// Gaussian AR surrogate: the noise characteristic-function modulus
/// exp(-<C t, t>/2) is < 1 for all t != 0 iff C is nondegenerate.
inline NonlatticeReport nonlattice_diagnostic(const ARModel& model, const std::vector<Vec>& t_grid) {
  NonlatticeReport rep;
  for (const Vec& t : t_grid) {
    if (t.norm() == 0) continue;
    const double r = std::exp(-0.5 * t.dot(model.noise_cov * t));
    rep.max_offzero_radius = std::max(rep.max_offzero_radius, r);
    if (r >= 1.0 - 1e-9) {
      rep.lattice_evidence = true;
      rep.flagged.push_back(t);
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Hypothesis diagnostics for the contractive iterative model.
// ---------------------------------------------------------------------------
struct LimReport {
  double contraction;       // ||A||_op, must be < 1
  double m_d;               // max((d-1)/2, 2)
  double eps0;
  int s = 0;                // xi(x) = x gives S = 1, s = 0
  int S = 1;
  double required_order;    // (s+1) m_d + eps0
  double mc_moment;         // Monte Carlo estimate of the required moment
  std::int64_t n_samples;
};

inline LimReport lim_hypothesis_report(const ARModel& model, double eps0 = 0.5,
                                       std::int64_t n_samples = 100000, std::uint64_t seed = 1) {
  LimReport rep;
  rep.contraction = model.operator_norm();
  if (rep.contraction >= 1.0)
    throw std::runtime_error("lim_hypothesis_report: contraction factor >= 1");
  rep.m_d = critical_order(model.dim());
  rep.eps0 = eps0;
  rep.required_order = (rep.s + 1) * rep.m_d + eps0;
  rep.n_samples = n_samples;
  const Vec x0 = model.stationary_mean();
  Rng rng(seed, 0);
  double acc = 0;
  for (std::int64_t i = 0; i < n_samples; ++i) {
    const Vec x1 = model.step(x0, rng);
    acc += std::pow((x1 - x0).norm(), rep.required_order);
  }
  rep.mc_moment = acc / double(n_samples);
  return rep;
}

}  // namespace renewalab
