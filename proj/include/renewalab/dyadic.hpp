#pragma once

#include "renewalab/core.hpp"
#include "renewalab/geometry.hpp"
#include "renewalab/jets.hpp"
#include "renewalab/quadrature.hpp"
#include "renewalab/rng.hpp"

namespace renewalab {

// ---------------------------------------------------------------------------
// Smallest k0 in N* with sqrt(2)/2^{k0-1} < r, so that the dilated annuli
// D_k(gamma_tilde_0), k >= k0, sit inside the ball B_r.
// ---------------------------------------------------------------------------
inline int k0_for_radius(double r) {
  if (r <= 0) throw std::invalid_argument("k0_for_radius: r must be positive");
  int k0 = 1;
  while (std::sqrt(2.0) / std::ldexp(1.0, k0 - 1) >= r) ++k0;
  return k0;
}

/// Bounding box of gamma_tilde_0 = {1/8 <= |w| <= 2}: |x_1| <= 2, ||x'||^2 <= 2.
inline void gamma_tilde0_box(int d, Vec& lo, Vec& hi) {
  lo.resize(d);
  hi.resize(d);
  lo(0) = -2.0;
  hi(0) = 2.0;
  for (int i = 1; i < d; ++i) {
    lo(i) = -std::sqrt(2.0);
    hi(i) = std::sqrt(2.0);
  }
}

// ---------------------------------------------------------------------------
// The bump gamma: a mollified radial profile in |w|, identically 1 on the
// annulus gamma_0 (|w| in [1/4, 1]) and supported in [1/8, 2].
// ---------------------------------------------------------------------------
inline Jet1 eta_profile_jet(double s) {
  if (s <= 0.125 || s >= 2.0) return {0, 0, 0};
  Jet1 rise = smoothstep_jet((s - 0.125) / 0.125);
  rise.d2 *= 64.0;
  rise.d1 *= 8.0;
  Jet1 fall = smoothstep_jet(2.0 - s);
  fall.d2 *= 1.0;
  fall.d1 *= -1.0;
  return rise * fall;
}

struct BumpGamma {
  int d;
  FuncHandle handle;

  explicit BumpGamma(int d_) : d(d_), handle(w_radial_handle(d_, [](double s) { return eta_profile_jet(s); })) {}

  double operator()(const Vec& x) const { return eta_profile_jet(w_abs(x)).v; }
};

// ---------------------------------------------------------------------------
// Dyadic partition of unity rho = gamma / phi, phi(x) = sum_k gamma(D_{-k} x).
// Since gamma is radial in |w| and |w(D_{-k} x)| = 4^k |w(x)| exactly, every
// evaluation reduces to the scalar profile.
// ---------------------------------------------------------------------------
namespace detail {

/// Index window of k with 4^k s possibly inside the support (1/8, 2),
/// padded by one on each side.
inline void eta_window(double s, int& k_lo, int& k_hi) {
  const double ln4 = std::log(4.0);
  k_lo = int(std::ceil((-std::log(8.0) - std::log(s)) / ln4)) - 1;
  k_hi = int(std::floor((std::log(2.0) - std::log(s)) / ln4)) + 1;
}

inline Jet1 phi_profile_jet(double s) {
  int k_lo, k_hi;
  eta_window(s, k_lo, k_hi);
  Jet1 acc{0, 0, 0};
  for (int k = k_lo; k <= k_hi; ++k) {
    const double f = std::ldexp(1.0, 2 * k);  // 4^k, exact
    Jet1 e = eta_profile_jet(f * s);
    e.d2 *= f * f;
    e.d1 *= f;
    acc = acc + e;
  }
  return acc;
}

inline Jet1 rho_profile_jet(double s) {
  if (s <= 0.125 || s >= 2.0) return {0, 0, 0};
  return eta_profile_jet(s) / phi_profile_jet(s);
}

}  // namespace detail

class DyadicPartition {
public:
  explicit DyadicPartition(int d)
      : d_(d),
        gamma_(d),
        rho_(w_radial_handle(d, [](double s) { return detail::rho_profile_jet(s); })) {}

  int dim() const { return d_; }
  const BumpGamma& gamma() const { return gamma_; }
  /// rho = gamma/phi as a jet-carrying handle, supported in gamma_tilde_0.
  const FuncHandle& rho() const { return rho_; }

  /// phi(x) = sum_k gamma(D_{-k} x); only the finite index window is summed.
  double phi_eval(const Vec& x) const {
    const double s = w_abs(x);
    if (s == 0) throw std::invalid_argument("phi_eval: undefined at x = 0 (phi(0) = 0)");
    return detail::phi_profile_jet(s).v;
  }

  /// sum_k rho(D_{-k} x); equals 1 for every x != 0.
  double partition_sum(const Vec& x) const {
    const double s = w_abs(x);
    if (s == 0) throw std::invalid_argument("partition_sum: undefined at x = 0");
    int k_lo, k_hi;
    detail::eta_window(s, k_lo, k_hi);
    double acc = 0;
    for (int k = k_lo; k <= k_hi; ++k) acc += detail::rho_profile_jet(std::ldexp(s, 2 * k)).v;
    return acc;
  }

  /// Number of nonzero terms gamma(D_{-k} x) (at most 3 for x != 0).
  int window_count(const Vec& x) const {
    const double s = w_abs(x);
    if (s == 0) return 0;
    int k_lo, k_hi;
    detail::eta_window(s, k_lo, k_hi);
    int c = 0;
    for (int k = k_lo; k <= k_hi; ++k)
      if (eta_profile_jet(std::ldexp(s, 2 * k)).v > 0) ++c;
    return c;
  }

private:
  int d_;
  BumpGamma gamma_;
  FuncHandle rho_;
};

// ---------------------------------------------------------------------------
// Sampling regions for empirical norms.
// ---------------------------------------------------------------------------
struct Region {
  enum class Kind { ball, box, gamma_tilde0 };

  Kind kind;
  int d;
  Vec center, lo, hi;
  double radius = 0;

  static Region ball(Vec c, double r) {
    Region g;
    g.kind = Kind::ball;
    g.d = int(c.size());
    g.center = std::move(c);
    g.radius = r;
    return g;
  }

  static Region box(Vec lo, Vec hi) {
    Region g;
    g.kind = Kind::box;
    g.d = int(lo.size());
    g.lo = std::move(lo);
    g.hi = std::move(hi);
    return g;
  }

  static Region gamma_tilde0(int d) {
    Region g;
    g.kind = Kind::gamma_tilde0;
    g.d = d;
    gamma_tilde0_box(d, g.lo, g.hi);
    return g;
  }

  bool contains(const Vec& x) const {
    switch (kind) {
      case Kind::ball:
        return (x - center).norm() <= radius;
      case Kind::box:
        for (int i = 0; i < d; ++i)
          if (x(i) < lo(i) || x(i) > hi(i)) return false;
        return true;
      case Kind::gamma_tilde0: {
        const double s = w_abs(x);
        return 0.125 <= s && s <= 2.0;
      }
    }
    return false;
  }

  double diameter() const {
    switch (kind) {
      case Kind::ball:
        return 2.0 * radius;
      default:
        return (hi - lo).norm();
    }
  }

  Vec sample(Rng& rng) const {
    switch (kind) {
      case Kind::ball: {
        Vec u = rng.gaussian_vec(d);
        u /= u.norm();
        return center + radius * std::pow(rng.uniform(), 1.0 / d) * u;
      }
      case Kind::box: {
        Vec x(d);
        for (int i = 0; i < d; ++i) x(i) = lo(i) + (hi(i) - lo(i)) * rng.uniform();
        return x;
      }
      case Kind::gamma_tilde0: {
        for (int tries = 0; tries < 100000; ++tries) {
          Vec x(d);
          for (int i = 0; i < d; ++i) x(i) = lo(i) + (hi(i) - lo(i)) * rng.uniform();
          if (contains(x)) return x;
        }
        throw std::runtime_error("Region::sample: rejection sampling failed");
      }
    }
    throw std::logic_error("Region::sample: unreachable");
  }
};

// ---------------------------------------------------------------------------
// Empirical Hoelder seminorm [g]_{tau} = sup |g(x)-g(y)| / ||x-y||^tau: a
// certified lower bound from sampled pairs (uniform, dyadic near-diagonal,
// axis-aligned, coordinate-zeroing), monotone in the budget.
// ---------------------------------------------------------------------------
template <class ValueFn>
double holder_seminorm(ValueFn&& g, double tau_order, const Region& region, int budget,
                       std::uint64_t seed = 20240901) {
  if (!(tau_order > 0 && tau_order <= 1)) throw std::invalid_argument("holder_seminorm: tau in (0,1] required");
  Rng rng(seed, 0);
  const double diam = region.diameter();
  double best = 0;
  for (int i = 0; i < budget; ++i) {
    const Vec x = region.sample(rng);
    Vec y;
    switch (i % 4) {
      case 0:
        y = region.sample(rng);
        break;
      case 1: {
        Vec u = rng.gaussian_vec(region.d);
        u /= u.norm();
        y = x + std::ldexp(diam, -(i / 4) % 24) * u;
        break;
      }
      case 2: {
        Vec u = Vec::Zero(region.d);
        u((i / 4) % region.d) = rng.uniform() < 0.5 ? 1.0 : -1.0;
        y = x + std::ldexp(diam, -(i / 4) % 24) * u;
        break;
      }
      default: {
        y = x;
        y((i / 4) % region.d) = 0.0;
        break;
      }
    }
    if (!region.contains(y)) continue;
    const double dist = (x - y).norm();
    if (dist < 1e-15) continue;
    const double q = std::abs(g(x) - g(y)) / std::pow(dist, tau_order);
    best = std::max(best, q);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Empirical C_b^m norm: sum of derivative sup-norms up to order floor(m),
// plus top-order Hoelder seminorms when m is fractional.
// ---------------------------------------------------------------------------
struct CbmNorm {
  double total = 0;
  std::vector<double> sup_by_order;  // summed sup norms per derivative order
  double holder_top = 0;             // summed top-order seminorms (0 for integer m)
};

inline CbmNorm cbm_norm(const FuncHandle& u, double m, const Region& region, int budget,
                        std::uint64_t seed = 20240902) {
  const int fl = int(std::floor(m));
  const double tau = m - fl;
  if (fl < 0 || fl > 2) throw std::invalid_argument("cbm_norm: derivative order beyond the jet catalog");
  const auto betas = multi_indices_upto(region.d, fl);

  Rng rng(seed, 1);
  std::vector<double> best_val(betas.size(), 0.0);
  std::vector<Vec> best_at(betas.size(), Vec::Zero(region.d));
  for (int i = 0; i < budget; ++i) {
    const Vec x = region.sample(rng);
    const Jet2 j = u.jet(x);
    for (size_t b = 0; b < betas.size(); ++b) {
      const double v = std::abs(j.partial(betas[b]));
      if (v > best_val[b]) {
        best_val[b] = v;
        best_at[b] = x;
      }
    }
  }
  // coordinate-ascent refinement from the best sample of each component
  const double diam = region.diameter();
  for (size_t b = 0; b < betas.size(); ++b) {
    Vec x = best_at[b];
    for (int round = 0; round < 3; ++round) {
      for (int axis = 0; axis < region.d; ++axis) {
        for (double step = 0.1 * diam; step > 1e-7 * diam; step *= 0.25) {
          for (double sgn : {1.0, -1.0}) {
            Vec y = x;
            y(axis) += sgn * step;
            if (!region.contains(y)) continue;
            const double v = std::abs(u.jet(y).partial(betas[b]));
            if (v > best_val[b]) {
              best_val[b] = v;
              x = y;
            }
          }
        }
      }
    }
  }

  CbmNorm out;
  out.sup_by_order.assign(fl + 1, 0.0);
  for (size_t b = 0; b < betas.size(); ++b) out.sup_by_order[mi_order(betas[b])] += best_val[b];
  for (double s : out.sup_by_order) out.total += s;
  if (tau > 1e-12) {
    for (size_t b = 0; b < betas.size(); ++b) {
      if (mi_order(betas[b]) != fl) continue;
      const MultiIndex beta = betas[b];
      auto top = [&](const Vec& x) { return u.jet(x).partial(beta); };
      out.holder_top += holder_seminorm(top, tau, region, budget, seed + 13 * b);
    }
    out.total += out.holder_top;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scaling-law tables: C_b^m norms of dilated families against k, with a
// fitted log2 slope.
// ---------------------------------------------------------------------------
enum class ScaledKind { theta, theta2, v, inv_v };

struct ScaledNormRow {
  int k;
  CbmNorm norm;
};

struct ScaledNormTable {
  std::vector<ScaledNormRow> rows;
  double fitted_slope;  // log2(norm) per unit k
};

inline ScaledNormTable scaled_norm_table(const FuncHandle& u, ScaledKind kind, int k_begin, int k_end,
                                         double m, int budget = 3000, std::uint64_t seed = 20240903) {
  const int k0 = k0_for_radius(u.domain_radius);
  if (k_begin < k0)
    throw std::invalid_argument("scaled_norm_table: k range starts below k0, dilated annuli leave the domain");
  const Region region = Region::gamma_tilde0(u.d);
  const FuncHandle one(u.d, std::numeric_limits<double>::infinity(),
                       [d = u.d](const Vec&) { return Jet2::constant(1.0, d); });
  ScaledNormTable table;
  std::vector<double> ks, logs;
  for (int k = k_begin; k <= k_end; ++k) {
    FuncHandle fk = dilated(u, k);
    if (kind == ScaledKind::inv_v) fk = quotient(one, fk);
    const CbmNorm n = cbm_norm(fk, m, region, budget, seed + k);
    table.rows.push_back({k, n});
    ks.push_back(double(k));
    logs.push_back(std::log2(std::max(n.total, 1e-300)));
  }
  table.fitted_slope = fit_slope(ks, logs);
  return table;
}

/// psi_k = rho * theta_k / v_k (or rho * theta_k / (v_k vtilde_k)): builds the
/// localized quotients on gamma_tilde_0, returns the fitted norm growth.
inline ScaledNormTable psi_k_norm_law(const FuncHandle& theta, const FuncHandle& v,
                                      const FuncHandle* vtilde, int k_begin, int k_end, double m,
                                      int budget = 3000, std::uint64_t seed = 20240904) {
  const int k0 = k0_for_radius(std::min(theta.domain_radius, v.domain_radius));
  if (k_begin < k0) throw std::invalid_argument("psi_k_norm_law: k range starts below k0");
  const Region region = Region::gamma_tilde0(theta.d);
  DyadicPartition part(theta.d);

  // band-constant sanity of v on the dilated annuli
  {
    Rng rng(seed, 77);
    for (int rep = 0; rep < 200; ++rep) {
      const Vec x = region.sample(rng);
      const Vec y = dilate(x, k_begin);
      const double ratio = std::abs(v.value(y)) / w_abs(y);
      if (ratio < 1e-8)
        throw std::runtime_error("psi_k_norm_law: band constants of v degenerate on the dilated annulus");
    }
  }

  ScaledNormTable table;
  std::vector<double> ks, logs;
  for (int k = k_begin; k <= k_end; ++k) {
    FuncHandle denom = dilated(v, k);
    if (vtilde) denom = product(denom, dilated(*vtilde, k));
    const FuncHandle psi = product(part.rho(), quotient(dilated(theta, k), denom));
    const CbmNorm n = cbm_norm(psi, m, region, budget, seed + k);
    table.rows.push_back({k, n});
    ks.push_back(double(k));
    logs.push_back(std::log2(std::max(n.total, 1e-300)));
  }
  table.fitted_slope = fit_slope(ks, logs);
  return table;
}

// ---------------------------------------------------------------------------
// Fourier transform of psi_k over gamma_tilde_0 by tensor Gauss-Legendre with
// oscillation-adapted node counts.
// ---------------------------------------------------------------------------
namespace detail {

inline std::vector<int> phase_adapted_nodes(const Vec& lo, const Vec& hi, const Vec& b, int base,
                                            int cap) {
  std::vector<int> n(lo.size());
  for (int i = 0; i < lo.size(); ++i) {
    const double phase_range = std::abs(b(i)) * (hi(i) - lo(i));
    n[i] = std::min(cap, base + int(std::ceil(phase_range / 1.5)));
  }
  return n;
}

}  // namespace detail

template <class ValueFn>
cplx fourier_on_gamma_tilde0(ValueFn&& psi, int d, const Vec& b, int base_nodes = 16, int cap = 2500) {
  Vec lo, hi;
  gamma_tilde0_box(d, lo, hi);
  const auto n = detail::phase_adapted_nodes(lo, hi, b, base_nodes, cap);
  return integrate_box([&](const Vec& t) { return psi(t) * std::exp(cplx(0, -t.dot(b))); }, lo, hi, n);
}

// ---------------------------------------------------------------------------
// hat{q}(a) = sum_{k >= k0} 2^{-k(d+1)} hat{psi_k}(D_k a) for q = theta/v
// (or theta/(v vtilde)) supported in the cone |w| <= 4^{-(k0+1)}.
// ---------------------------------------------------------------------------
struct DyadicFourierResult {
  cplx value;
  int k_used;                  // last shell index summed
  std::vector<double> shell_abs;  // |term| per shell, from k0
};

template <class QValueFn>
DyadicFourierResult dyadic_fourier(QValueFn&& q, const DyadicPartition& part, int d, int k0, const Vec& a,
                                   int base_nodes = 16, double rel_tail = 1e-4, int max_shells = 40) {
  DyadicFourierResult res;
  res.value = 0;
  auto rho_val = [&](const Vec& t) { return part.rho().value(t).real(); };
  int quiet = 0;
  bool seen_mass = false;
  double peak = 0;
  int k = k0;
  for (; k < k0 + max_shells; ++k) {
    auto psi_k = [&](const Vec& t) -> cplx { return rho_val(t) * q(dilate(t, k)); };
    const Vec b = dilate(a, k);
    const cplx term = std::ldexp(1.0, -k * (d + 1)) * fourier_on_gamma_tilde0(psi_k, d, b, base_nodes);
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
  if (k >= k0 + max_shells) {
    if (!seen_mass) {  // q identically zero on the cone
      res.k_used = k0;
      return res;
    }
    throw std::runtime_error("dyadic_fourier: shell series did not reach the tail envelope");
  }
  res.k_used = k;
  return res;
}

// ---------------------------------------------------------------------------
// Direct 2-d oracle: integral of q(t) e^{-i<t,a>} over the band
// {|w(t)| <= w_out} via strips in t_2 with dyadically graded inner blocks
// around the 1/w singular scale t_2^2. Independent of the dyadic-sum route.
// ---------------------------------------------------------------------------
template <class QValueFn>
cplx direct_band_fourier_2d(QValueFn&& q, double w_out, const Vec& a, int outer_blocks = 12,
                            int nodes_outer = 24, int nodes_inner = 16) {
  const double t2_max = std::sqrt(w_out);
  cplx acc = 0;
  auto inner_integral = [&](double t2) -> cplx {
    const double w2 = w_out * w_out - std::pow(t2, 4.0);
    if (w2 <= 0) return 0;
    const double T = std::sqrt(w2);
    const double c = std::max(t2 * t2, 1e-300);
    // blocks [0,c],[c,2c],... capped at T, mirrored to negative t_1
    std::vector<std::pair<double, double>> blocks;
    double b0 = 0, b1 = std::min(c, T);
    if (b1 > b0) blocks.push_back({b0, b1});
    while (b1 < T) {
      b0 = b1;
      b1 = std::min(2.0 * b1, T);
      blocks.push_back({b0, b1});
      if (blocks.size() > 4000) break;
    }
    cplx s = 0;
    for (auto [x0, x1] : blocks) {
      const int n = std::min(400, nodes_inner + int(std::abs(a(0)) * (x1 - x0) / 1.5));
      const auto& rule = gauss_legendre(n);
      for (int i = 0; i < n; ++i) {
        const double mid = 0.5 * (x0 + x1) + 0.5 * (x1 - x0) * rule.nodes[i];
        const double w = 0.5 * (x1 - x0) * rule.weights[i];
        for (double sgn : {1.0, -1.0}) {
          Vec t(2);
          t << sgn * mid, t2;
          s += w * q(t) * std::exp(cplx(0, -t.dot(a)));
        }
      }
    }
    return s;
  };
  // outer: dyadic blocks in t_2 from t2_max down, both signs
  double hi = t2_max;
  for (int blk = 0; blk < outer_blocks; ++blk) {
    const double lo = (blk + 1 == outer_blocks) ? 0.0 : hi * 0.5;
    const int n = std::min(400, nodes_outer + int(std::abs(a(1)) * (hi - lo) / 1.5));
    const auto& rule = gauss_legendre(n);
    for (int i = 0; i < n; ++i) {
      const double t2 = 0.5 * (lo + hi) + 0.5 * (hi - lo) * rule.nodes[i];
      const double w = 0.5 * (hi - lo) * rule.weights[i];
      acc += w * (inner_integral(t2) + inner_integral(-t2));
    }
    hi = lo;
    if (hi == 0) break;
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Fourier decay check along rays: scaled values ||a||^{(d-1)/2} |hat q(a)|.
// ---------------------------------------------------------------------------
struct FourierDecayRow {
  double magnitude;
  double q_hat_abs;
  double scaled;
};

struct FourierDecayReport {
  std::vector<std::vector<FourierDecayRow>> rays;
  bool decay_ok = true;
};

/// theta must be compactly supported in the cone |w| <= 4^{-(k0+1)} (the
/// outer part of a general quotient is smooth and handled by the classical
/// transform bound, so only the cone part is exercised here).
inline FourierDecayReport fourier_decay_check(const FuncHandle& theta, const FuncHandle& v,
                                              const FuncHandle* vtilde, const std::vector<Vec>& ray_dirs,
                                              const std::vector<double>& magnitudes, int base_nodes = 16,
                                              bool require_decay = true) {
  const int d = theta.d;
  const double r = std::min(theta.domain_radius, v.domain_radius);
  const int k0 = k0_for_radius(r);
  // support precondition: theta vanishes wherever |w| exceeds the cone bound
  {
    Rng rng(4242, 0);
    const Region ball = Region::ball(Vec::Zero(d), 0.999 * r);
    const double w_out = std::ldexp(1.0, -2 * (k0 + 1));
    for (int i = 0; i < 500; ++i) {
      const Vec x = ball.sample(rng);
      if (w_abs(x) > w_out && std::abs(theta.value(x)) > 1e-12)
        throw std::invalid_argument("fourier_decay_check: theta not supported in the cone region");
    }
  }
  DyadicPartition part(d);
  auto q = [&](const Vec& x) -> cplx {
    const cplx th = theta.value(x);
    if (th == 0.0) return 0.0;
    cplx denom = v.value(x);
    if (vtilde) denom *= vtilde->value(x);
    return th / denom;
  };
  FourierDecayReport report;
  for (const Vec& dir : ray_dirs) {
    std::vector<FourierDecayRow> rows;
    for (double mag : magnitudes) {
      const Vec a = mag * (dir / dir.norm());
      const auto res = dyadic_fourier(q, part, d, k0, a, base_nodes);
      rows.push_back({mag, std::abs(res.value), std::pow(mag, 0.5 * (d - 1)) * std::abs(res.value)});
    }
    if (rows.size() >= 2) {
      const double first = rows.front().scaled, last = rows.back().scaled;
      if (!(first == 0.0 && last == 0.0) && !(last <= 0.7 * first)) report.decay_ok = false;
    }
    report.rays.push_back(std::move(rows));
  }
  if (require_decay && !report.decay_ok)
    throw std::runtime_error("fourier_decay_check: scaled transform did not decrease by 30%");
  return report;
}

/// Shell L1 masses of |q| against a direct band quadrature (d = 2 oracle).
struct L1Report {
  std::vector<double> shell_mass;  // from k0
  double dyadic_total = 0;
  double direct_total = 0;
};

inline L1Report dyadic_l1_report(const FuncHandle& theta, const FuncHandle& v, const FuncHandle* vtilde,
                                 int nodes = 48, int max_shells = 40) {
  const int d = theta.d;
  if (d != 2) throw std::invalid_argument("dyadic_l1_report: direct oracle implemented for d = 2");
  const int k0 = k0_for_radius(std::min(theta.domain_radius, v.domain_radius));
  DyadicPartition part(d);
  auto q_abs = [&](const Vec& x) -> double {
    const cplx th = theta.value(x);
    if (th == 0.0) return 0.0;
    cplx denom = v.value(x);
    if (vtilde) denom *= vtilde->value(x);
    return std::abs(th / denom);
  };
  L1Report rep;
  Vec lo, hi;
  gamma_tilde0_box(d, lo, hi);
  for (int k = k0; k < k0 + max_shells; ++k) {
    const cplx mass = std::ldexp(1.0, -k * (d + 1)) *
                      integrate_box(
                          [&](const Vec& t) -> cplx {
                            return part.rho().value(t).real() * q_abs(dilate(t, k));
                          },
                          lo, hi, nodes);
    rep.shell_mass.push_back(mass.real());
    rep.dyadic_total += mass.real();
    if (mass.real() < 1e-12 * std::max(rep.dyadic_total, 1e-300) && k > k0 + 3) break;
  }
  const double w_out = std::ldexp(1.0, -2 * (k0 + 1));
  rep.direct_total =
      direct_band_fourier_2d([&](const Vec& t) -> cplx { return q_abs(t); }, w_out, Vec::Zero(2)).real();
  return rep;
}

// ---------------------------------------------------------------------------
// Classical transform bound ||a||^m |hat u(a)| for smooth compactly
// supported u: empirical constant over a sample of frequencies.
// ---------------------------------------------------------------------------
struct CmFourierRow {
  double magnitude;
  double u_hat_abs;
  double scaled;  // ||a||^m |hat u(a)|
};

struct CmFourierReport {
  std::vector<CmFourierRow> rows;
  double empirical_sup = 0;
  double norm_bound = 0;  // ||u||_0 + sum of top-order Hoelder seminorms
  bool stable = true;     // sup over the upper half-range does not exceed the lower
};

inline CmFourierReport cm_fourier_bound_check(const FuncHandle& u, double m, const Vec& ray_dir,
                                              const std::vector<double>& magnitudes, int base_nodes = 24) {
  const double R = u.domain_radius;
  Vec lo = Vec::Constant(u.d, -R), hi = Vec::Constant(u.d, R);
  CmFourierReport rep;
  double lo_half = 0, hi_half = 0;
  for (size_t i = 0; i < magnitudes.size(); ++i) {
    const Vec a = magnitudes[i] * (ray_dir / ray_dir.norm());
    const auto n = detail::phase_adapted_nodes(lo, hi, a, base_nodes, 3000);
    const cplx uh =
        integrate_box([&](const Vec& t) { return u.value(t) * std::exp(cplx(0, -t.dot(a))); }, lo, hi, n);
    const double scaled = std::pow(a.norm(), m) * std::abs(uh);
    rep.rows.push_back({magnitudes[i], std::abs(uh), scaled});
    rep.empirical_sup = std::max(rep.empirical_sup, scaled);
    if (i < magnitudes.size() / 2)
      lo_half = std::max(lo_half, scaled);
    else
      hi_half = std::max(hi_half, scaled);
  }
  rep.stable = hi_half <= lo_half + 1e-12;
  const Region region = Region::ball(Vec::Zero(u.d), R);
  const int fl = int(std::floor(m));
  const double tau = m - fl;
  double bound = 0;
  {
    Rng rng(99, 0);
    for (int i = 0; i < 2000; ++i) bound = std::max(bound, std::abs(u.value(region.sample(rng))));
  }
  if (tau > 1e-12 && fl <= 2) {
    for (const auto& beta : multi_indices_upto(u.d, fl)) {
      if (mi_order(beta) != fl) continue;
      auto top = [&](const Vec& x) { return u.jet(x).partial(beta); };
      bound += holder_seminorm(top, tau, region, 4000);
    }
  }
  rep.norm_bound = bound;
  return rep;
}

// ---------------------------------------------------------------------------
// Product rule for Hoelder seminorms, checked on shared sampled pairs:
// [fg] <= ||f|| [g] + ||g|| [f] (2% estimation slack).
// ---------------------------------------------------------------------------
struct ProductHolderReport {
  double fg_semi, f_semi, g_semi, f_sup, g_sup;
  bool holds;
};

inline ProductHolderReport product_holder_check(const FuncHandle& f, const FuncHandle& g, double sigma,
                                                const Region& region, int budget,
                                                std::uint64_t seed = 20240905) {
  ProductHolderReport rep{};
  auto fv = [&](const Vec& x) { return f.value(x); };
  auto gv = [&](const Vec& x) { return g.value(x); };
  auto fgv = [&](const Vec& x) { return f.value(x) * g.value(x); };
  rep.f_semi = holder_seminorm(fv, sigma, region, budget, seed);
  rep.g_semi = holder_seminorm(gv, sigma, region, budget, seed);
  rep.fg_semi = holder_seminorm(fgv, sigma, region, budget, seed);
  Rng rng(seed, 3);
  rep.f_sup = 0;
  rep.g_sup = 0;
  for (int i = 0; i < budget; ++i) {
    const Vec x = region.sample(rng);
    rep.f_sup = std::max(rep.f_sup, std::abs(f.value(x)));
    rep.g_sup = std::max(rep.g_sup, std::abs(g.value(x)));
  }
  rep.holds = rep.fg_semi <= 1.02 * (rep.f_sup * rep.g_semi + rep.g_sup * rep.f_semi);
  return rep;
}

}  // namespace renewalab
