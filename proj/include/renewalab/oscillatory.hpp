#pragma once

#include "renewalab/core.hpp"
#include "renewalab/dyadic.hpp"
#include "renewalab/geometry.hpp"
#include "renewalab/jets.hpp"
#include "renewalab/quadrature.hpp"
#include "renewalab/renewal.hpp"

namespace renewalab {

// ---------------------------------------------------------------------------
// Smooth radial cutoff chi: 1 on ||t|| <= rho_in, 0 on ||t|| >= R_out.
// ---------------------------------------------------------------------------
struct CutoffFunction {
  int d;
  double rho_in, R_out;
  FuncHandle handle;

  CutoffFunction(int d_, double rho_, double R_) : d(d_), rho_in(rho_), R_out(R_), handle(radial_cutoff(d_, rho_, R_)) {}

  double operator()(const Vec& t) const { return handle.value(t).real(); }
};

// ---------------------------------------------------------------------------
// Quadrature check of the Gaussian transform identity
//   (2 pi)^{-n/2} int exp(-||x||^2/2) exp(-i<x,b>) dx = exp(-||b||^2/2).
// ---------------------------------------------------------------------------
inline double gauss_fourier_identity_check(int n, const Vec& b, int nodes_per_axis = 64) {
  if (n < 1 || n > 3) throw std::invalid_argument("gauss_fourier_identity_check: n in {1,2,3}");
  if (b.size() != n) throw std::invalid_argument("gauss_fourier_identity_check: size mismatch");
  const cplx lhs = std::pow(2.0 * pi, -0.5 * n) *
                   integrate_gaussian_weight([&](const Vec& x) { return std::exp(cplx(0, -x.dot(b))); }, n,
                                             nodes_per_axis);
  return std::abs(lhs - std::exp(-0.5 * b.squaredNorm()));
}

// ---------------------------------------------------------------------------
// Reduced evaluation of
//   J_mu(tau) = int exp(-(mu^2 v1^2 + ||v'||^4)/2)
//               exp(-i(tau mu + u1) v1) exp(-i<u', v'>) / (-i mu v1 + ||v'||^2) dv.
// The v1 integral collapses to a complementary-error-function factor, leaving
// a Gaussian-weighted transverse integral free of large-tau oscillation;
// transverse nodes are placed at the 1/sqrt(tau) concentration scale.
// ---------------------------------------------------------------------------
inline cplx j1_reduced(double tau, double u1_val, const Vec& uprime_val, int d, int nodes = 64) {
  if (d < 2 || d > 3) throw std::invalid_argument("j1_reduced: d in {2,3}");
  const double tt = tau + u1_val;
  if (tt <= 0) throw std::invalid_argument("j1_reduced: tau + u1(tau) must be positive");
  if (uprime_val.size() != d - 1) throw std::invalid_argument("j1_reduced: u' must have d-1 components");
  const Vec c = uprime_val / std::sqrt(2.0 * tt);
  auto upper_gauss_tail = [](double z) { return std::sqrt(0.5 * pi) * std::erfc(z / std::sqrt(2.0)); };
  const cplx transverse = integrate_gaussian_weight(
      [&](const Vec& y) {
        return std::exp(cplx(0, -c.dot(y))) * upper_gauss_tail(y.squaredNorm() / (2.0 * tt) - tt);
      },
      d - 1, nodes);
  return std::sqrt(2.0 * pi) * std::pow(2.0 * tt, -0.5 * (d - 1)) * transverse;
}

/// General mu != 0 reduces to mu = 1 through the substitution w1 = mu v1.
inline cplx j_mu_reduced(double mu, double tau, const std::function<double(double)>& u1,
                         const std::function<Vec(double)>& uprime, int d, int nodes = 64) {
  if (mu == 0) throw std::invalid_argument("j_mu_reduced: mu must be nonzero");
  return j1_reduced(tau, u1(tau) / mu, uprime(tau), d, nodes) / std::abs(mu);
}

inline double j_mu_asymptote(double mu, const Vec& ellprime, int d, double tau) {
  return 2.0 * std::pow(pi, 0.5 * (d + 1)) * std::exp(-0.25 * ellprime.squaredNorm()) /
         (std::abs(mu) * std::pow(tau, 0.5 * (d - 1)));
}

// ---------------------------------------------------------------------------
// Closed-form limit of the oscillatory integral:
//   2 pi^{(d+1)/2} / ||w|| * k(0) * exp(-(||P||^2||w||^2 - <P,w>^2)/(4||w||^2)).
// ---------------------------------------------------------------------------
inline double prop_equivalent_limit(const Vec& w_vec, const Vec& frak_P, double k0_val) {
  const int d = int(w_vec.size());
  const double nw = w_vec.norm();
  if (nw == 0) throw std::invalid_argument("prop_equivalent_limit: w must be nonzero");
  const double dot = frak_P.dot(w_vec);
  const double expo = -(frak_P.squaredNorm() * nw * nw - dot * dot) / (4.0 * nw * nw);
  return 2.0 * std::pow(pi, 0.5 * (d + 1)) / nw * k0_val * std::exp(std::min(0.0, expo));
}

// ---------------------------------------------------------------------------
// Shell-decomposed quadrature of F(t) e^{-i<t, phase>} over R^d \ {0}, using
// the dyadic partition of unity on the anisotropic annuli:
//   integral = int F (1 - Phi) + sum_{k >= k_start} 2^{-k(d+1)}
//              int rho(t) F(D_k t) e^{-i<t, D_k phase>} dt,
// where Phi(x) = sum_{k >= k_start} rho(D_{-k} x) equals 1 near 0 and the
// complement F (1 - Phi) is smooth and integrated over the support box.
// Starting at k_start = -1 keeps every dilation contracting, so per-shell
// integrands never develop sub-node features. Shell refinement stops when
// contributions fall below rel_tail of the running total for two shells.
// ---------------------------------------------------------------------------
struct ShellIntegral {
  cplx value;
  int k_last;
  std::vector<double> shell_abs;  // from k_start = -1
};

namespace detail {

/// Partition weight sum over shells k >= k_start at the scalar |w| value.
inline double rho_tail_sum(double s, int k_start) {
  int k_lo, k_hi;
  eta_window(s, k_lo, k_hi);
  double acc = 0;
  for (int k = std::max(k_lo, k_start); k <= k_hi; ++k)
    acc += rho_profile_jet(std::ldexp(s, 2 * k)).v;
  return acc;
}

}  // namespace detail

template <class Fn>
ShellIntegral shell_integrate(Fn&& f, int d, const Vec& phase, double support_radius,
                              int base_nodes = 48, double rel_tail = 1e-3, int cap_nodes = 2500,
                              int max_depth = 40) {
  DyadicPartition part(d);
  constexpr int k_start = -1;

  ShellIntegral res{0.0, k_start, {}};

  // smooth outer complement, supported in {|w| >= 4^{-k_start}/8}; node
  // escalation until the value settles (the mollifier profiles are Gevrey
  // regular, so fixed node counts cannot be trusted across support sizes)
  {
    const Vec lo_box = Vec::Constant(d, -support_radius);
    const Vec hi_box = Vec::Constant(d, support_radius);
    auto outer_f = [&](const Vec& x) -> cplx {
      const double s = w_abs(x);
      if (s == 0.0) return 0.0;
      const double weight = 1.0 - detail::rho_tail_sum(s, k_start);
      if (weight <= 0.0) return 0.0;
      const cplx fx = f(x);
      if (fx == 0.0) return 0.0;
      return weight * fx * std::exp(cplx(0, -x.dot(phase)));
    };
    const int growth = int(std::ceil(2.0 * support_radius));
    std::vector<int> n = detail::phase_adapted_nodes(lo_box, hi_box, phase, base_nodes + 4 * growth,
                                                     cap_nodes);
    cplx outer = integrate_box(outer_f, lo_box, hi_box, n);
    for (int round = 0; round < 3; ++round) {
      bool at_cap = true;
      for (int i = 0; i < d; ++i) {
        at_cap = at_cap && n[size_t(i)] >= cap_nodes;
        n[size_t(i)] = std::min(cap_nodes, n[size_t(i)] + n[size_t(i)] / 2);
      }
      if (at_cap) break;
      const cplx refined = integrate_box(outer_f, lo_box, hi_box, n);
      const double change = std::abs(refined - outer);
      outer = refined;
      if (change < 0.25 * rel_tail * (std::abs(refined) + 1e-300)) break;
    }
    res.value = outer;
  }

  Vec lo, hi;
  gamma_tilde0_box(d, lo, hi);
  auto rho_val = [&](const Vec& t) { return part.rho().value(t).real(); };

  int quiet = 0;
  bool seen_mass = false;
  double peak = 0;
  int k = k_start;
  for (; k < k_start + max_depth; ++k) {
    const Vec b = dilate(phase, k);
    std::vector<int> n = detail::phase_adapted_nodes(lo, hi, b, base_nodes, cap_nodes);
    if (k < 0) {
      // shell k = -1 expands the integrand; densify accordingly
      n[0] = std::min(cap_nodes, 4 * n[0]);
      for (int i = 1; i < d; ++i) n[size_t(i)] = std::min(cap_nodes, 2 * n[size_t(i)]);
    }
    const cplx term =
        std::ldexp(1.0, -k * (d + 1)) *
        integrate_box(
            [&](const Vec& t) -> cplx {
              const double r = rho_val(t);
              if (r == 0.0) return 0.0;
              return r * f(dilate(t, k)) * std::exp(cplx(0, -t.dot(b)));
            },
            lo, hi, n);
    res.value += term;
    res.shell_abs.push_back(std::abs(term));
    peak = std::max(peak, std::abs(term));
    seen_mass = seen_mass || std::abs(term) > 0;
    const double scale = std::max({std::abs(res.value), peak, 1e-300});
    if (seen_mass && std::abs(term) < rel_tail * scale) {
      if (++quiet >= 2) break;
    } else {
      quiet = 0;
    }
  }
  if (k >= k_start + max_depth) {
    if (!seen_mass) {
      res.k_last = k_start;
      return res;
    }
    throw std::runtime_error("shell_integrate: shell series did not converge within the depth cap");
  }
  res.k_last = k;
  return res;
}

// ---------------------------------------------------------------------------
// Direct quadrature of int k(u) e^{-i<u, phase>} / (-i<w,u> + ||u||^2) du.
// Coordinates are rotated so the singular weight matches the anisotropic
// shells; the integrable 1/w-type singularity at 0 is absorbed by the shell
// decomposition.
// ---------------------------------------------------------------------------
template <class KFn>
cplx oscillatory_integral_phase(KFn&& k_fn, const Vec& w_vec, const Vec& phase, double support_radius,
                                int base_nodes = 32, double rel_tail = 1e-3, int cap_nodes = 2500) {
  const int d = int(w_vec.size());
  const double nw = w_vec.norm();
  if (nw == 0) throw std::invalid_argument("oscillatory_integral_phase: w must be nonzero");
  const Mat T = rotation_to_e1(w_vec);
  const Vec rphase = T * phase;
  auto f = [&](const Vec& v) -> cplx {
    const cplx kv = k_fn(T.transpose() * v);
    if (kv == 0.0) return 0.0;
    return kv / cplx(v.squaredNorm(), -nw * v(0));
  };
  return shell_integrate(f, d, rphase, support_radius, base_nodes, rel_tail, cap_nodes).value;
}

template <class KFn>
cplx oscillatory_integral_direct(KFn&& k_fn, const Vec& w_vec, double tau,
                                 const std::function<Vec(double)>& p_fn, double support_radius,
                                 int base_nodes = 32, double rel_tail = 1e-3, int cap_nodes = 2500) {
  const int d = int(w_vec.size());
  if (d < 2 || d > 3) throw std::invalid_argument("oscillatory_integral_direct: d in {2,3}");
  if (tau > 1e3) throw std::invalid_argument("oscillatory_integral_direct: tau above the direct-quadrature cap 1e3");
  const Vec phase = tau * w_vec + (p_fn ? p_fn(tau) : Vec::Zero(d));
  return oscillatory_integral_phase(k_fn, w_vec, phase, support_radius, base_nodes, rel_tail, cap_nodes);
}

// ---------------------------------------------------------------------------
// Main part I_1(a) = hhat0 L0 int chi(t) e^{-i<t,a>} / (-i||m||t_1 + <Sigma t,t>/2) dt
// in drift-aligned coordinates, evaluated through the eigen-factor change of
// variables t = P Delta^{-1} u that normalizes the quadratic form.
// ---------------------------------------------------------------------------
inline cplx i1_value(double L0, const Vec& m, const SymPosDef& sigma, const CutoffFunction& chi,
                     const Vec& a, double hhat0 = 1.0, int base_nodes = 32, double rel_tail = 1e-3,
                     int cap_nodes = 2500) {
  const int d = int(m.size());
  const Mat P = sigma.eigenvectors();
  const Vec sqrt_ev = sigma.eigenvalues().cwiseSqrt();
  const Vec ell = sqrt_ev.cwiseInverse().asDiagonal() * (P.transpose() * Vec::Unit(d, 0));
  const Vec w = 2.0 * m.norm() * ell;
  const Vec phase = sqrt_ev.cwiseInverse().asDiagonal() * (P.transpose() * a);
  const double det_delta = sqrt_ev.prod();
  const double support = chi.R_out * sqrt_ev.maxCoeff() * 1.001;
  auto k_fn = [&](const Vec& u) -> cplx {
    const Vec t = P * (sqrt_ev.cwiseInverse().asDiagonal() * u);
    return chi(t);
  };
  const cplx integral = oscillatory_integral_phase(k_fn, w, phase, support, base_nodes, rel_tail, cap_nodes);
  return 2.0 * hhat0 * L0 / det_delta * integral;
}

struct LadderRow {
  double tau;
  cplx scaled;    // tau^{(d-1)/2} I_1(a(tau)) (or the scaled error term)
  double limit;
  double deviation;  // |scaled - limit| / limit
};

struct LadderReport {
  std::vector<LadderRow> rows;
  bool pass = true;
};

/// Ladder of tau^{(d-1)/2} I_1(a(tau)) against the renewal-constant limit
/// (2 pi)^{(d+1)/2} C(L0, m, Sigma, frak_A) hhat0.
inline LadderReport i1_limit_check(double L0, const Vec& m, const SymPosDef& sigma,
                                   const CutoffFunction& chi, const Vec& frak_A,
                                   const std::vector<double>& taus, double hhat0 = 1.0,
                                   double tolerance_top = 0.05, int base_nodes = 32,
                                   double rel_tail = 1e-4, int cap_nodes = 2500) {
  const int d = int(m.size());
  const double limit = std::pow(2.0 * pi, 0.5 * (d + 1)) * renewal_constant(L0, m, sigma, frak_A) * hhat0;
  LadderReport rep;
  for (double tau : taus) {
    const Vec a = tau * m + std::sqrt(tau) * frak_A;
    const cplx scaled = std::pow(tau, 0.5 * (d - 1)) * i1_value(L0, m, sigma, chi, a, hhat0, base_nodes,
                                                                rel_tail, cap_nodes);
    rep.rows.push_back({tau, scaled, limit, std::abs(scaled - limit) / limit});
  }
  rep.pass = !rep.rows.empty() && rep.rows.back().deviation < tolerance_top;
  return rep;
}

// ---------------------------------------------------------------------------
// Error term E_1(a) for the analytic Gaussian surrogate
//   lambda(t) = exp(i<t, m> - <Sigma_c t, t>/2),   Sigma_c = Sigma - m m^T,
// whose gradient and Hessian at 0 reproduce (m, Sigma) exactly. Reports
// ||a||^{(d-1)/2} |E_1(a)| along a tau ladder at a(tau) = tau m.
// ---------------------------------------------------------------------------
struct E1Row {
  double tau;
  double scaled;          // ||a||^{(d-1)/2} |E_1(a)|
  double ratio_to_first;
  double e11_abs;
  double e12_abs;
};

struct E1Report {
  std::vector<E1Row> rows;
  bool pass = true;  // >= 30% decay from first to last rung
};

inline E1Report e1_decay_check(const Vec& m, const SymPosDef& sigma, const CutoffFunction& chi,
                               const std::vector<double>& taus, double L0 = 1.0, double hhat0 = 1.0,
                               std::function<cplx(const Vec&)> lambda_fn = nullptr, int base_nodes = 32,
                               double rel_tail = 1e-4) {
  const int d = int(m.size());
  const Mat T = rotation_to_e1(m);
  const double nm = m.norm();
  const Mat sig_rot = T * sigma.matrix() * T.transpose();
  Mat sig_c = sig_rot;
  sig_c(0, 0) -= nm * nm;

  auto lambda = lambda_fn ? lambda_fn : std::function<cplx(const Vec&)>([nm, sig_c](const Vec& t) {
    return std::exp(cplx(-0.5 * t.dot(sig_c * t), nm * t(0)));
  });
  auto vtilde = [&](const Vec& t) { return cplx(0.5 * t.dot(sig_rot * t), -nm * t(0)); };

  const double hL = hhat0 * L0;
  auto e11_f = [&](const Vec& t) -> cplx {
    const double c = chi(t);
    if (c == 0.0) return 0.0;
    const cplx lam = lambda(t);
    return c * (hL * lam - hL) / (1.0 - lam);
  };
  auto e12_f = [&](const Vec& t) -> cplx {
    const double c = chi(t);
    if (c == 0.0) return 0.0;
    const cplx lam = lambda(t);
    const cplx theta2 = lam - 1.0 - cplx(0, nm * t(0)) + 0.5 * t.dot(sig_rot * t);
    // below the cancellation floor of the O(1) subtraction the numerator is
    // numerically zero; the singular denominator would otherwise amplify it
    if (std::abs(theta2) < 1e-14 * (1.0 + std::abs(lam))) return 0.0;
    return hL * c * theta2 / ((1.0 - lam) * vtilde(t));
  };

  E1Report rep;
  double first = -1;
  for (double tau : taus) {
    const Vec a_rot = tau * nm * Vec::Unit(d, 0);  // T(tau m)
    const double support = chi.R_out * 1.001;
    const cplx e11 = shell_integrate(e11_f, d, a_rot, support, base_nodes, rel_tail).value;
    const cplx e12 = shell_integrate(e12_f, d, a_rot, support, base_nodes, rel_tail).value;
    const double scaled = std::pow(tau * nm, 0.5 * (d - 1)) * std::abs(e11 + e12);
    if (first < 0) first = scaled;
    rep.rows.push_back({tau, scaled, first > 0 ? scaled / first : 0.0, std::abs(e11), std::abs(e12)});
  }
  if (rep.rows.size() >= 2) {
    const double last = rep.rows.back().scaled;
    rep.pass = first == 0.0 ? true : last <= 0.7 * first;
  }
  return rep;
}

}  // namespace renewalab
