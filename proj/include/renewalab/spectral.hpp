#pragma once

#include "renewalab/core.hpp"
#include "renewalab/geometry.hpp"
#include "renewalab/markov.hpp"

namespace renewalab {

// ---------------------------------------------------------------------------
// Fourier operator of a finite chain: M[x,y] = P[x,y] exp(i <t, xi(y)>),
// acting on state-indexed vectors. M(t)^n paired with (mu, f) gives
// E_n(t) = E_mu[f(X_n) exp(i <t, S_n>)].
// ---------------------------------------------------------------------------
struct FourierOperator {
  Vec t;
  CMat M;
};

/// Bilinear pairing a^T b (no conjugation).
inline cplx bilinear(const CVec& a, const CVec& b) { return a.conjugate().dot(b); }

inline FourierOperator fourier_operator(const FiniteChain& chain, const Vec& t) {
  if (t.size() != chain.dim()) throw std::invalid_argument("fourier_operator: frequency dimension mismatch");
  return {t, twisted_matrix(chain, t)};
}

/// E_n(t) = mu^T M(t)^n f by iterated products.
inline cplx fourier_expectation(const FiniteChain& chain, const FourierOperator& op, int n) {
  CVec v = chain.f.cast<cplx>();
  for (int i = 0; i < n; ++i) v = op.M * v;
  return bilinear(chain.mu.cast<cplx>(), v);
}

// ---------------------------------------------------------------------------
// Dominant eigen-triple.
// ---------------------------------------------------------------------------
struct EigenTriple {
  cplx lambda;
  CVec right;        // scaled so that its mean is 1 (all-ones at t = 0)
  CVec left;         // scaled so that left^T right = 1 (pi at t = 0)
  double sub_modulus;  // |lambda_2| from one deflation step
};

namespace detail {

struct PowerResult {
  cplx lambda;
  CVec vec;
  bool converged;
};

/// Power iteration with Rayleigh-quotient eigenvalue estimates; convergence
/// is declared when the eigen residual ||Mv - lambda v|| drops below
/// tol * scale. Matrices with a (numerically) zero dominant eigenvalue
/// converge to lambda = 0.
template <class ApplyFn>
PowerResult power_iterate(ApplyFn&& apply, int n, double tol, int max_iter, double scale) {
  CVec v = CVec::Ones(n) / std::sqrt(double(n));
  cplx lambda = 0;
  for (int it = 0; it < max_iter; ++it) {
    CVec w = apply(v);
    const double nw = w.norm();
    if (nw < 1e-14 * scale) return {0.0, v, true};
    lambda = v.dot(w);  // v^H w with ||v|| = 1
    const double resid = (w - lambda * v).norm();
    v = w / nw;
    if (resid <= tol * scale && it > 2) return {lambda, v, true};
  }
  return {lambda, v, false};
}

}  // namespace detail

/// Dominant eigen-triple by power iteration on M and M^T, polished with the
/// two-sided Rayleigh quotient (l^T M r)/(l^T r). One deflation step yields
/// |lambda_2| for the spectral-gap guard |lambda_2|/|lambda_1| < 0.999.
inline EigenTriple dominant_eig(const FourierOperator& op, double tol = 1e-12, int max_iter = 100000) {
  const int n = int(op.M.rows());
  const double scale = std::max(1.0, op.M.norm());
  auto right_apply = [&](const CVec& v) -> CVec { return op.M * v; };
  auto left_apply = [&](const CVec& v) -> CVec { return op.M.transpose() * v; };
  auto pr = detail::power_iterate(right_apply, n, tol, max_iter, scale);
  auto pl = detail::power_iterate(left_apply, n, tol, max_iter, scale);
  if (!pr.converged || !pl.converged)
    throw std::runtime_error("dominant_eig: power iteration did not converge (no spectral gap?)");

  CVec r = pr.vec;
  CVec l = pl.vec;
  const cplx pairing = bilinear(l, r);
  if (std::abs(pairing) < 1e-12)
    throw std::runtime_error("dominant_eig: left/right eigenvector pairing nearly singular");
  const cplx lambda = bilinear(l, op.M * r) / pairing;

  // Normalization: mean(right) = 1 pins the all-ones function at t = 0.
  const cplx mean_r = r.sum() / double(n);
  if (std::abs(mean_r) < 1e-8) throw std::runtime_error("dominant_eig: right eigenvector mean degenerate");
  r /= mean_r;
  l /= bilinear(l, r);

  // One deflation step: M' = M - lambda r l^T has the remaining spectrum.
  // A Rayleigh power iteration recovers |lambda_2| when the subdominant
  // eigenvalue is simple; for equal-modulus pairs the geometric mean of the
  // growth factors still converges to the common modulus.
  CMat deflated = op.M - lambda * (r * l.transpose());
  double sub = 0;
  {
    auto sub_apply = [&](const CVec& v) -> CVec { return deflated * v; };
    auto ps = detail::power_iterate(sub_apply, n, 1e-11, 20000, scale);
    if (ps.converged) {
      sub = std::abs(ps.lambda);
    } else {
      CVec v = ps.vec;
      std::vector<double> growth;
      double gm = std::abs(ps.lambda);
      for (int it = 0; it < 4096; ++it) {
        CVec w = deflated * v;
        const double nw = w.norm();
        if (nw < 1e-14 * scale) {
          gm = 0;
          break;
        }
        growth.push_back(nw);
        v = w / nw;
      }
      if (growth.size() >= 64) {
        double s = 0;
        for (size_t i = growth.size() - 64; i < growth.size(); ++i) s += std::log(growth[i]);
        gm = std::exp(s / 64.0);
      }
      sub = gm;
    }
  }

  if (std::abs(lambda) > 1e-12 && sub / std::abs(lambda) >= 0.999)
    throw std::runtime_error("dominant_eig: spectral gap below guard (|lambda_2|/|lambda_1| >= 0.999)");

  const double resid = (op.M * r - lambda * r).norm() / r.norm();
  if (resid > 1e-11) throw std::runtime_error("dominant_eig: eigen residual above 1e-11");
  return {lambda, r, l, sub};
}

// ---------------------------------------------------------------------------
// Decomposition E_n(t) = lambda(t)^n L(t) + R_n(t).
// ---------------------------------------------------------------------------
struct DecompositionRow {
  int n;
  cplx e_n;
  cplx remainder;
};

struct DecompositionReport {
  cplx lambda;
  cplx L;
  double sub_modulus;
  double fitted_rate;  // 0 when the remainder is identically ~0 (rank-one case)
  std::vector<DecompositionRow> rows;
};

inline DecompositionReport decomposition_check(const FiniteChain& chain, const Vec& t, int n_max) {
  const auto op = fourier_operator(chain, t);
  const auto eig = dominant_eig(op);
  const cplx mu_r = bilinear(chain.mu.cast<cplx>(), eig.right);
  const cplx l_f = bilinear(eig.left, chain.f.cast<cplx>());
  const cplx L = mu_r * l_f;

  DecompositionReport rep;
  rep.lambda = eig.lambda;
  rep.L = L;
  rep.sub_modulus = eig.sub_modulus;

  CVec v = chain.f.cast<cplx>();
  cplx pw = 1.0;
  std::vector<double> xs, ys;
  // cancellation floor of E_n - lambda^n L for O(1) expectations
  const double floor = 5e-12 * std::max(1.0, chain.f.cwiseAbs().maxCoeff());
  for (int n = 1; n <= n_max; ++n) {
    v = op.M * v;
    pw *= eig.lambda;
    const cplx e_n = bilinear(chain.mu.cast<cplx>(), v);
    const cplx r_n = e_n - pw * L;
    rep.rows.push_back({n, e_n, r_n});
    if (std::abs(r_n) > floor) {
      xs.push_back(double(n));
      ys.push_back(std::log(std::abs(r_n)));
    }
  }
  if (xs.size() < 4) {
    // remainder at the noise floor throughout: rank-one / degenerate case
    bool all_tiny = true;
    for (const auto& row : rep.rows) all_tiny = all_tiny && std::abs(row.remainder) < floor;
    if (!all_tiny) throw std::runtime_error("decomposition_check: too few usable remainder points");
    rep.fitted_rate = 0;
    return rep;
  }
  rep.fitted_rate = std::exp(fit_slope(xs, ys));
  if (rep.fitted_rate > eig.sub_modulus + 0.01)
    throw std::runtime_error("decomposition_check: remainder not geometric at the subdominant rate");
  return rep;
}

// ---------------------------------------------------------------------------
// Finite-difference Taylor data of lambda at 0, with Richardson extrapolation
// (base step h = 1e-4). Cross-checked against the stationary quantities.
// ---------------------------------------------------------------------------
inline cplx lambda_at(const FiniteChain& chain, const Vec& t) {
  return dominant_eig(fourier_operator(chain, t)).lambda;
}

inline Vec grad_lambda_zero(const FiniteChain& chain, double h = 1e-4) {
  const int d = chain.dim();
  auto central = [&](double step) {
    CVec g(d);
    for (int j = 0; j < d; ++j) {
      Vec e = Vec::Zero(d);
      e(j) = step;
      g(j) = (lambda_at(chain, e) - lambda_at(chain, -e)) / (2.0 * step);
    }
    return g;
  };
  const CVec d1 = central(h);
  const CVec d2 = central(h / 2);
  const CVec grad = (4.0 * d2 - d1) / 3.0;
  const CVec m_c = cplx(0, -1) * grad;
  Vec m(d);
  for (int j = 0; j < d; ++j) m(j) = m_c(j).real();
  const Vec m_exact = mean_vector(chain);
  if ((m - m_exact).norm() > 1e-4)
    throw std::runtime_error("grad_lambda_zero: disagreement with the stationary mean above 1e-4");
  return m;
}

inline Mat hess_lambda_zero(const FiniteChain& chain, double h = 1e-4) {
  const int d = chain.dim();
  const cplx l0 = lambda_at(chain, Vec::Zero(d));
  auto hess_step = [&](double s) {
    CMat H(d, d);
    for (int j = 0; j < d; ++j) {
      Vec e = Vec::Zero(d);
      e(j) = s;
      H(j, j) = (lambda_at(chain, e) - 2.0 * l0 + lambda_at(chain, -e)) / (s * s);
    }
    for (int j = 0; j < d; ++j)
      for (int k = j + 1; k < d; ++k) {
        Vec epp = Vec::Zero(d), epm = Vec::Zero(d);
        epp(j) = s; epp(k) = s;
        epm(j) = s; epm(k) = -s;
        const cplx v = (lambda_at(chain, epp) - lambda_at(chain, epm) - lambda_at(chain, -epm) +
                        lambda_at(chain, -epp)) /
                       (4.0 * s * s);
        H(j, k) = v;
        H(k, j) = v;
      }
    return H;
  };
  const CMat h1 = hess_step(h);
  const CMat h2 = hess_step(h / 2);
  const CMat hess = (4.0 * h2 - h1) / 3.0;
  // Hess lambda(0) is real; a nonvanishing imaginary part signals roundoff
  // swamping the stencil (same role as an asymmetry check, which the
  // symmetric 4-point stencil cannot trip by construction).
  double instability = 0;
  Mat sigma(d, d);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) {
      sigma(j, k) = -hess(j, k).real();
      instability = std::max(instability, std::abs(hess(j, k).imag()));
    }
  if (instability > 1e-6)
    throw std::runtime_error("hess_lambda_zero: differentiation instability above 1e-6");
  return 0.5 * (sigma + sigma.transpose());
}

// ---------------------------------------------------------------------------
// Rotation of the chain so that the drift points along e_1.
// ---------------------------------------------------------------------------
inline FiniteChain rotate_chain_to_e1(const FiniteChain& chain) {
  const Vec m = mean_vector(chain);
  const Mat t = rotation_to_e1(m);
  return FiniteChain(chain.P, chain.xi * t.transpose(), chain.mu, chain.f);
}

// ---------------------------------------------------------------------------
// Residual report for lambda(t) = 1 + i ||m|| t_1 - <Sigma t, t>/2 + o(|t|^2),
// in rotated coordinates.
// ---------------------------------------------------------------------------
struct TaylorRow {
  Vec t;
  double resid;         // |lambda(t) - quadratic model|
  double resid_scaled;  // resid / ||t||^2
};

struct TaylorReport {
  std::vector<TaylorRow> rows;
  double fitted_order;  // slope of log resid vs log ||t||
};

inline TaylorReport taylor_check(const FiniteChain& rotated, const std::vector<Vec>& t_samples) {
  const Vec m = mean_vector(rotated);
  if (std::abs(m.norm() - m(0)) > 1e-10 * m.norm())
    throw std::invalid_argument("taylor_check: chain not rotated (drift not along e_1)");
  const Mat sigma = longrun_sigma(rotated).sigma;
  TaylorReport rep;
  std::vector<double> xs, ys;
  for (const Vec& t : t_samples) {
    const cplx quad = 1.0 + cplx(0, m.norm() * t(0)) - 0.5 * t.dot(sigma * t);
    const double resid = std::abs(lambda_at(rotated, t) - quad);
    rep.rows.push_back({t, resid, resid / t.squaredNorm()});
    if (resid > 1e-14) {
      xs.push_back(std::log(t.norm()));
      ys.push_back(std::log(resid));
    }
  }
  rep.fitted_order = xs.size() >= 2 ? fit_slope(xs, ys) : 3.0;
  return rep;
}

// ---------------------------------------------------------------------------
// Empirical band constants alpha <= |1 - lambda(t)| / |w(t)| <= beta over a
// grid on the punctured ball B_R \ {0}, in rotated coordinates.
// ---------------------------------------------------------------------------
struct BandConstants {
  double alpha, beta;
};

inline BandConstants v0_band_constants(const FiniteChain& rotated, double R, int per_axis = 9,
                                       int radial = 6) {
  const int d = rotated.dim();
  double alpha = std::numeric_limits<double>::infinity(), beta = 0;
  // angular directions from an axis grid on the sphere plus radial ladder
  std::vector<Vec> dirs;
  std::vector<int> idx(d, 0);
  while (true) {
    Vec u(d);
    for (int i = 0; i < d; ++i) u(i) = -1.0 + 2.0 * idx[i] / double(per_axis - 1);
    if (u.norm() > 1e-9) dirs.push_back(u / u.norm());
    int i = 0;
    for (; i < d; ++i) {
      if (++idx[i] < per_axis) break;
      idx[i] = 0;
    }
    if (i == d) break;
  }
  for (const Vec& u : dirs) {
    for (int j = 1; j <= radial; ++j) {
      const Vec t = (R * j / double(radial + 1)) * u;
      const double ratio = std::abs(1.0 - lambda_at(rotated, t)) / w_abs(t);
      alpha = std::min(alpha, ratio);
      beta = std::max(beta, ratio);
    }
  }
  if (alpha < 1e-8) throw std::runtime_error("v0_band_constants: band failure, R too large");
  return {alpha, beta};
}

// ---------------------------------------------------------------------------
// (t, lambda, L) grid rows for CSV emission.
// ---------------------------------------------------------------------------
struct LambdaGridRow {
  Vec t;
  cplx lambda;
  cplx L;
};

inline std::vector<LambdaGridRow> lambda_grid(const FiniteChain& chain, const std::vector<Vec>& ts) {
  std::vector<LambdaGridRow> rows;
  rows.reserve(ts.size());
  for (const Vec& t : ts) {
    const auto op = fourier_operator(chain, t);
    const auto eig = dominant_eig(op);
    const cplx mu_r = bilinear(chain.mu.cast<cplx>(), eig.right);
    const cplx l_f = bilinear(eig.left, chain.f.cast<cplx>());
    rows.push_back({t, eig.lambda, mu_r * l_f});
  }
  return rows;
}

}  // namespace renewalab
