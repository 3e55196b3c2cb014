#pragma once

#include <functional>

#include "renewalab/core.hpp"
#include "renewalab/geometry.hpp"
#include "renewalab/rng.hpp"

namespace renewalab {

// ---------------------------------------------------------------------------
// Order-2 jets of complex-valued functions on R^d: value, gradient, Hessian.
// The built-in catalog of test functions carries analytic derivatives via
// this algebra; nothing here differentiates numerically.
// ---------------------------------------------------------------------------
struct Jet2 {
  cplx v;
  CVec g;
  CMat h;

  static Jet2 constant(cplx c, int d) { return {c, CVec::Zero(d), CMat::Zero(d, d)}; }

  cplx partial(const MultiIndex& beta) const {
    switch (mi_order(beta)) {
      case 0:
        return v;
      case 1:
        for (size_t i = 0; i < beta.size(); ++i)
          if (beta[i] == 1) return g(int(i));
        break;
      case 2: {
        int first = -1, second = -1;
        for (size_t i = 0; i < beta.size(); ++i) {
          if (beta[i] == 2) { first = second = int(i); }
          if (beta[i] == 1) (first < 0 ? first : second) = int(i);
        }
        return h(first, second);
      }
      default:
        break;
    }
    throw std::invalid_argument("Jet2::partial: unsupported multi-index");
  }
};

inline Jet2 operator+(const Jet2& a, const Jet2& b) { return {a.v + b.v, a.g + b.g, a.h + b.h}; }
inline Jet2 operator-(const Jet2& a, const Jet2& b) { return {a.v - b.v, a.g - b.g, a.h - b.h}; }
inline Jet2 operator*(cplx c, const Jet2& a) { return {c * a.v, c * a.g, c * a.h}; }

inline Jet2 operator*(const Jet2& a, const Jet2& b) {
  return {a.v * b.v, a.v * b.g + b.v * a.g,
          a.v * b.h + b.v * a.h + a.g * b.g.transpose() + b.g * a.g.transpose()};
}

inline Jet2 reciprocal(const Jet2& a) {
  const cplx inv = 1.0 / a.v;
  const CVec g = -inv * inv * a.g;
  const CMat h = 2.0 * inv * inv * inv * (a.g * a.g.transpose()) - inv * inv * a.h;
  return {inv, g, h};
}

inline Jet2 operator/(const Jet2& a, const Jet2& b) { return a * reciprocal(b); }

/// Composition g(s(x)) of a scalar 1-d jet g at s with the order-2 jet of a
/// real-valued inner function s (value, gradient, Hessian supplied).
inline Jet2 compose(const Jet1& g, double /*s*/, const Vec& grad_s, const Mat& hess_s) {
  Jet2 out;
  out.v = g.v;
  out.g = (g.d1 * grad_s).cast<cplx>();
  out.h = (g.d2 * (grad_s * grad_s.transpose()) + g.d1 * hess_s).cast<cplx>();
  return out;
}

// ---------------------------------------------------------------------------
// Function handles: evaluation plus analytic order-2 jets on a domain.
// ---------------------------------------------------------------------------
struct FuncHandle {
  int d = 2;
  double domain_radius = 1.0;  // handles are declared on the ball B_r
  std::function<Jet2(const Vec&)> jet;
  std::function<cplx(const Vec&)> value;  // fast path; defaults to jet(x).v

  FuncHandle() = default;
  FuncHandle(int d_, double r_, std::function<Jet2(const Vec&)> jet_,
             std::function<cplx(const Vec&)> value_ = nullptr)
      : d(d_), domain_radius(r_), jet(std::move(jet_)), value(std::move(value_)) {
    if (!value) {
      auto j = jet;
      value = [j](const Vec& x) { return j(x).v; };
    }
  }
};

inline FuncHandle product(const FuncHandle& a, const FuncHandle& b) {
  if (a.d != b.d) throw std::invalid_argument("product: dimension mismatch");
  auto ja = a.jet, jb = b.jet;
  auto va = a.value, vb = b.value;
  return FuncHandle(a.d, std::min(a.domain_radius, b.domain_radius),
                    [ja, jb](const Vec& x) { return ja(x) * jb(x); },
                    [va, vb](const Vec& x) { return va(x) * vb(x); });
}

inline FuncHandle quotient(const FuncHandle& a, const FuncHandle& b) {
  if (a.d != b.d) throw std::invalid_argument("quotient: dimension mismatch");
  auto ja = a.jet, jb = b.jet;
  auto va = a.value, vb = b.value;
  return FuncHandle(a.d, std::min(a.domain_radius, b.domain_radius),
                    [ja, jb](const Vec& x) { return ja(x) / jb(x); },
                    [va, vb](const Vec& x) { return va(x) / vb(x); });
}

/// u_k(x) = u(D_k x); jets pick up the anisotropic dilation factors.
inline FuncHandle dilated(const FuncHandle& u, int k) {
  auto ju = u.jet;
  auto vu = u.value;
  const int d = u.d;
  Vec scale(d);
  scale(0) = std::ldexp(1.0, -2 * k);
  for (int i = 1; i < d; ++i) scale(i) = std::ldexp(1.0, -k);
  return FuncHandle(d, std::numeric_limits<double>::infinity(),
                    [ju, scale](const Vec& x) {
                      Vec y = x.cwiseProduct(scale);
                      Jet2 j = ju(y);
                      const CVec cs = scale.cast<cplx>();
                      j.g = j.g.cwiseProduct(cs);
                      j.h = CMat(cs.asDiagonal() * j.h * cs.asDiagonal());
                      return j;
                    },
                    [vu, scale](const Vec& x) { return vu(x.cwiseProduct(scale)); });
}

// ---------------------------------------------------------------------------
// Jets of |w(x)| = sqrt(x_1^2 + ||x'||^4), smooth away from x = 0.
// ---------------------------------------------------------------------------
struct WAbsJet {
  double s;
  Vec grad;
  Mat hess;
};

inline WAbsJet w_abs_jet(const Vec& x) {
  const int d = int(x.size());
  const double tp = x.tail(d - 1).squaredNorm();  // ||x'||^2
  const double q = x(0) * x(0) + tp * tp;
  const double s = std::sqrt(q);
  if (s == 0) throw std::invalid_argument("w_abs_jet: singular at the origin");
  Vec gq(d);
  gq(0) = 2.0 * x(0);
  for (int i = 1; i < d; ++i) gq(i) = 4.0 * x(i) * tp;
  Mat hq = Mat::Zero(d, d);
  hq(0, 0) = 2.0;
  for (int i = 1; i < d; ++i)
    for (int j = 1; j < d; ++j) hq(i, j) = (i == j ? 4.0 * tp : 0.0) + 8.0 * x(i) * x(j);
  WAbsJet out;
  out.s = s;
  out.grad = gq / (2.0 * s);
  out.hess = hq / (2.0 * s) - gq * gq.transpose() / (4.0 * s * s * s);
  return out;
}

/// Handle for a radial profile in |w|: x -> profile(|w(x)|). On plateaus of
/// the profile (zero 1-d derivatives, including the region around x = 0 for
/// profiles locally constant there) the jet short-circuits to a constant.
inline FuncHandle w_radial_handle(int d, std::function<Jet1(double)> profile) {
  return FuncHandle(d, std::numeric_limits<double>::infinity(),
                    [profile, d](const Vec& x) {
                      const double s = w_abs(x);
                      const Jet1 p = profile(s);
                      if (p.d1 == 0.0 && p.d2 == 0.0) return Jet2::constant(p.v, d);
                      const WAbsJet w = w_abs_jet(x);
                      return compose(p, w.s, w.grad, w.hess);
                    },
                    [profile](const Vec& x) { return cplx(profile(w_abs(x)).v, 0.0); });
}

/// The coordinate function x -> x_i with exact jets.
inline FuncHandle coordinate_handle(int d, int i, double domain_radius = 1.0) {
  return FuncHandle(d, domain_radius,
                    [d, i](const Vec& x) {
                      Jet2 j = Jet2::constant(x(i), d);
                      j.g(i) = 1.0;
                      return j;
                    },
                    [i](const Vec& x) { return cplx(x(i), 0.0); });
}

inline FuncHandle constant_handle(int d, cplx c, double domain_radius = 1.0) {
  return FuncHandle(d, domain_radius, [d, c](const Vec&) { return Jet2::constant(c, d); },
                    [c](const Vec&) { return c; });
}

// ---------------------------------------------------------------------------
// Radial cutoff in ||x||: 1 on ||x|| <= rho, 0 on ||x|| >= R, mollified.
// ---------------------------------------------------------------------------
inline FuncHandle radial_cutoff(int d, double rho, double R) {
  if (!(0 < rho && rho < R)) throw std::invalid_argument("radial_cutoff: need 0 < rho < R");
  auto jet = [d, rho, R](const Vec& x) {
    const double n = x.norm();
    if (n <= rho) return Jet2::constant(1.0, d);
    if (n >= R) return Jet2::constant(0.0, d);
    Jet1 st = smoothstep_jet((R - n) / (R - rho));
    const double c = -1.0 / (R - rho);
    st.d2 *= c * c;
    st.d1 *= c;
    const Vec grad_n = x / n;
    const Mat hess_n = Mat::Identity(d, d) / n - x * x.transpose() / (n * n * n);
    return compose(st, n, grad_n, hess_n);
  };
  auto value = [rho, R](const Vec& x) {
    const double n = x.norm();
    if (n <= rho) return cplx(1.0, 0.0);
    if (n >= R) return cplx(0.0, 0.0);
    return cplx(smoothstep((R - n) / (R - rho)), 0.0);
  };
  return FuncHandle(d, R, jet, value);
}

// ---------------------------------------------------------------------------
// Finite-difference cross-check of declared jets at sampled points.
// Returns the worst relative deviation over gradient and Hessian entries.
// ---------------------------------------------------------------------------
inline double check_derivatives(const FuncHandle& u, const std::vector<Vec>& points, double h = 1e-5) {
  double worst = 0;
  for (const Vec& x : points) {
    const Jet2 j = u.jet(x);
    double scale = std::abs(j.v);
    for (int i = 0; i < u.d; ++i) scale = std::max(scale, std::abs(j.g(i)));
    scale = std::max(scale, 1.0);
    for (int i = 0; i < u.d; ++i) {
      Vec e = Vec::Zero(u.d);
      e(i) = h;
      const cplx fd = (u.jet(x + e).v - u.jet(x - e).v) / (2.0 * h);
      worst = std::max(worst, std::abs(fd - j.g(i)) / scale);
      const CVec gd = (u.jet(x + e).g - u.jet(x - e).g) / (2.0 * h);
      for (int k = 0; k < u.d; ++k) worst = std::max(worst, std::abs(gd(k) - j.h(i, k)) / scale);
    }
  }
  return worst;
}

}  // namespace renewalab
