#pragma once

#include <sstream>

#include "renewalab/dyadic.hpp"
#include "renewalab/jets.hpp"
#include "renewalab/markov.hpp"

namespace renewalab {

// ---------------------------------------------------------------------------
// Built-in models. Frozen parameters so CLI runs and tests are reproducible.
// ---------------------------------------------------------------------------
inline ARModel make_ar_model(const std::string& name) {
  if (name == "ar-gaussian-2d") {
    Mat a(2, 2);
    a << 0.5, 0.0, 0.0, 0.2;
    Vec mean(2);
    mean << 0.5, 0.0;
    return ARModel(a, mean, Mat::Identity(2, 2));
  }
  if (name == "ar-gaussian-3d") {
    Mat a = 0.3 * Mat::Identity(3, 3);
    Vec mean(3);
    mean << 0.7, 0.0, 0.0;
    return ARModel(a, mean, Mat::Identity(3, 3));
  }
  if (name == "deterministic-drift-2d") {
    Vec mean(2);
    mean << 1.0, 0.0;
    return ARModel(Mat::Zero(2, 2), mean, Mat::Zero(2, 2));
  }
  throw std::invalid_argument("make_ar_model: unknown model '" + name + "'");
}

inline FiniteChain make_chain(const std::string& name) {
  if (name == "chain-2state-lattice") {
    Mat p(2, 2);
    p << 0.5, 0.5, 0.7, 0.3;
    Mat xi(2, 2);
    xi << 1.0, 0.0, 0.0, 1.0;
    Vec mu(2);
    mu << 0.5, 0.5;
    return FiniteChain(p, xi, mu);
  }
  if (name == "chain-2state-2d") {
    Mat p(2, 2);
    p << 0.6, 0.4, 0.3, 0.7;
    Mat xi(2, 2);
    xi << 1.0, 0.5, 0.25, 1.25;
    Vec mu(2);
    mu << 1.0, 0.0;
    return FiniteChain(p, xi, mu);
  }
  if (name == "chain-3state-2d") {
    Mat p(3, 3);
    p << 0.6, 0.3, 0.1, 0.2, 0.5, 0.3, 0.3, 0.2, 0.5;
    Mat xi(3, 2);
    xi << 1.0, 0.2, 0.3, 1.1, -0.2, 0.5;
    Vec mu(3);
    mu << 1.0, 0.0, 0.0;
    return FiniteChain(p, xi, mu);
  }
  if (name == "chain-3state-lattice-3d") {
    Mat p(3, 3);
    p << 0.2, 0.5, 0.3, 0.4, 0.4, 0.2, 0.25, 0.25, 0.5;
    Mat xi(3, 3);
    xi << 1.0, 0.0, 2.0, 0.0, 1.0, -1.0, 1.0, 1.0, 0.0;
    Vec mu(3);
    mu << 1.0, 0.0, 0.0;
    return FiniteChain(p, xi, mu);
  }
  throw std::invalid_argument("make_chain: unknown chain '" + name + "'");
}

inline bool is_chain_model(const std::string& name) { return name.rfind("chain-", 0) == 0; }

// ---------------------------------------------------------------------------
// Built-in test functions for the dyadic suites (analytic jets throughout).
// ---------------------------------------------------------------------------

/// theta = chi * x_2: vanishes at 0, smooth, compactly supported in B_1.
inline FuncHandle make_theta_x2(int d) {
  return product(radial_cutoff(d, 0.5, 1.0), coordinate_handle(d, 1));
}

/// Vanishing-jet theta (value, first and second derivatives zero at 0):
/// chi * x_2^3 in dimension 2, chi * x_2^2 x_3 in dimension >= 3.
inline FuncHandle make_theta_jet3(int d) {
  const FuncHandle chi = radial_cutoff(d, 0.5, 1.0);
  const FuncHandle x2 = coordinate_handle(d, 1);
  if (d == 2) return product(chi, product(x2, product(x2, x2)));
  return product(chi, product(x2, product(x2, coordinate_handle(d, 2))));
}

/// v(x) = -i x_1 + ||x||^2: transverse first derivatives vanish at 0, and
/// |w|/2 <= |v| <= (1 + r) |w| holds on every ball B_r (the lower bound is
/// radius-free: |v| >= |x_1| and |v| >= ||x'||^2).
inline FuncHandle make_v_quadratic(int d, double domain_radius = 0.5) {
  return FuncHandle(d, domain_radius,
                    [d](const Vec& x) {
                      Jet2 j;
                      j.v = cplx(x.squaredNorm(), -x(0));
                      j.g = (2.0 * x).cast<cplx>();
                      j.g(0) += cplx(0, -1);
                      j.h = 2.0 * CMat::Identity(d, d);
                      return j;
                    },
                    [](const Vec& x) { return cplx(x.squaredNorm(), -x(0)); });
}

/// v(x) = 1 - exp(i x_1 - ||x||^2 / 2): the analytic surrogate of 1 - lambda
/// for a unit-drift, identity-covariance walk.
inline FuncHandle make_v_surrogate(int d) {
  auto jet = [d](const Vec& x) {
    const cplx phi(-0.5 * x.squaredNorm(), x(0));
    const cplx e = std::exp(phi);
    CVec gphi = (-x).cast<cplx>();
    gphi(0) += cplx(0, 1);
    Jet2 j;
    j.v = 1.0 - e;
    j.g = -e * gphi;
    j.h = -e * (gphi * gphi.transpose() - CMat::Identity(d, d));
    return j;
  };
  return FuncHandle(d, 0.5, jet, [](const Vec& x) {
    return 1.0 - std::exp(cplx(-0.5 * x.squaredNorm(), x(0)));
  });
}

/// Cone-supported theta for the Fourier-decay checks: a |w|-radial bump equal
/// to 1 inside |w| <= w_in and vanishing outside |w| >= 4^{-(k0+1)}, times
/// (i x_1 + x_2). The linear factor mixes parities, so drift-ray transforms
/// do not vanish by symmetry, and |theta| stays smooth away from 0. The
/// default radius matches the quadratic v of the catalog, keeping the cone
/// index k0 consistent across quotient pairs.
inline FuncHandle make_theta_cone(int d, double domain_radius = 0.5) {
  const int k0 = k0_for_radius(domain_radius);
  const double w_out = std::ldexp(1.0, -2 * (k0 + 1));
  const double w_in = 0.5 * w_out;
  auto profile = [w_in, w_out](double s) {
    if (s >= w_out) return Jet1{0, 0, 0};
    Jet1 j = smoothstep_jet((w_out - s) / (w_out - w_in));
    const double c = -1.0 / (w_out - w_in);
    j.d2 *= c * c;
    j.d1 *= c;
    return j;
  };
  FuncHandle bump = w_radial_handle(d, profile);
  bump.domain_radius = domain_radius;
  FuncHandle linear(d, domain_radius,
                    [d](const Vec& x) {
                      Jet2 j = Jet2::constant(cplx(x(1), x(0)), d);
                      j.g(0) = cplx(0, 1);
                      j.g(1) = 1.0;
                      return j;
                    },
                    [](const Vec& x) { return cplx(x(1), x(0)); });
  return product(bump, linear);
}

/// Centered mollifier bump for the classical transform bound.
inline FuncHandle make_u_bump(int d) { return radial_cutoff(d, 0.3, 0.8); }

inline FuncHandle make_test_function(const std::string& name, int d) {
  if (name == "theta-x2") return make_theta_x2(d);
  if (name == "theta-jet3") return make_theta_jet3(d);
  if (name == "theta-cone") return make_theta_cone(d);
  if (name == "v-quadratic") return make_v_quadratic(d);
  if (name == "v-surrogate") return make_v_surrogate(d);
  if (name == "u-bump") return make_u_bump(d);
  throw std::invalid_argument("make_test_function: unknown entry '" + name + "'");
}

// ---------------------------------------------------------------------------
// Catalog listing (stable ordering).
// ---------------------------------------------------------------------------
inline std::string list_catalog() {
  std::ostringstream os;
  os << "models:\n"
     << "  ar-gaussian-2d         AR(1), A=diag(0.5,0.2), noise N((0.5,0), I); drift (1,0)\n"
     << "  ar-gaussian-3d         AR(1), A=0.3 I, noise N((0.7,0,0), I); drift (1,0,0)\n"
     << "  deterministic-drift-2d zero-noise walk, S_n = (n, 0) exactly\n"
     << "  chain-2state-lattice   2 states, integer increments (1,0)/(0,1)\n"
     << "  chain-2state-2d        2 states, increments (1,0.5)/(0.25,1.25)\n"
     << "  chain-3state-2d        3 states, planar increments, generic drift\n"
     << "  chain-3state-lattice-3d 3 states, integer increments in R^3\n"
     << "test-functions:\n"
     << "  theta-x2               chi * x_2 (vanishes at 0)\n"
     << "  theta-jet3             chi * x_2^3 (d=2) or chi * x_2^2 x_3 (d>=3); vanishing first/second jets\n"
     << "  theta-cone             |w|-radial bump times (i x_1 + x_2), supported in the cone |w| <= 4^{-(k0+1)}\n"
     << "  v-quadratic            -i x_1 + ||x||^2\n"
     << "  v-surrogate            1 - exp(i x_1 - ||x||^2/2)\n"
     << "  u-bump                 radial mollifier bump (supp in B_0.8)\n";
  return os.str();
}

}  // namespace renewalab
