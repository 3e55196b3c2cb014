#pragma once

#include <functional>
#include <map>
#include <mutex>

#include "renewalab/core.hpp"

namespace renewalab {

struct QuadRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule on [-1,1], nodes by Newton iteration on P_n.
inline QuadRule gauss_legendre_raw(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n >= 1 required");
  QuadRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double pp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2. * j + 1.) * x * p1 - j * p2) / (j + 1.);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  return r;
}

/// Gauss-Hermite rule for weight exp(-x^2), via Golub-Welsch.
inline QuadRule gauss_hermite_raw(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: n >= 1 required");
  Mat j = Mat::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = std::sqrt(0.5 * k);
    j(k - 1, k) = b;
    j(k, k - 1) = b;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(j);
  QuadRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const double mu0 = std::sqrt(pi);
  for (int i = 0; i < n; ++i) {
    r.nodes[i] = es.eigenvalues()(i);
    r.weights[i] = mu0 * sqr(es.eigenvectors()(0, i));
  }
  return r;
}

namespace detail {
inline const QuadRule& cached(int n, bool hermite) {
  static std::map<int, QuadRule> gl, gh;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto& cache = hermite ? gh : gl;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, hermite ? gauss_hermite_raw(n) : gauss_legendre_raw(n)).first;
  return it->second;
}
}  // namespace detail

inline const QuadRule& gauss_legendre(int n) { return detail::cached(n, false); }
inline const QuadRule& gauss_hermite(int n) { return detail::cached(n, true); }

/// Iterate a tensor grid: per-axis rules, callback(point, weight).
template <class F>
void tensor_for_each(const std::vector<const QuadRule*>& axes, F&& fn) {
  const int d = int(axes.size());
  std::vector<int> idx(d, 0);
  Vec x(d);
  while (true) {
    double w = 1.0;
    for (int i = 0; i < d; ++i) {
      x(i) = axes[i]->nodes[idx[i]];
      w *= axes[i]->weights[idx[i]];
    }
    fn(x, w);
    int i = 0;
    for (; i < d; ++i) {
      if (++idx[i] < int(axes[i]->nodes.size())) break;
      idx[i] = 0;
    }
    if (i == d) break;
  }
}

/// Tensor Gauss-Legendre integral of fn over a box, n nodes per axis.
template <class F>
cplx integrate_box(F&& fn, const Vec& lo, const Vec& hi, const std::vector<int>& n_axis) {
  const int d = int(lo.size());
  if (hi.size() != d || int(n_axis.size()) != d) throw std::invalid_argument("integrate_box: size mismatch");
  std::vector<const QuadRule*> axes(d);
  double jac = 1.0;
  for (int i = 0; i < d; ++i) {
    axes[i] = &gauss_legendre(n_axis[i]);
    jac *= 0.5 * (hi(i) - lo(i));
  }
  cplx acc = 0;
  Vec x(d);
  tensor_for_each(axes, [&](const Vec& t, double w) {
    for (int i = 0; i < d; ++i) x(i) = 0.5 * (lo(i) + hi(i)) + 0.5 * (hi(i) - lo(i)) * t(i);
    acc += w * fn(x);
  });
  return jac * acc;
}

template <class F>
cplx integrate_box(F&& fn, const Vec& lo, const Vec& hi, int n_per_axis) {
  return integrate_box(std::forward<F>(fn), lo, hi, std::vector<int>(lo.size(), n_per_axis));
}

/// Tensor Gauss-Hermite integral of g against the weight exp(-||x||^2 / 2)
/// over R^d (the weight is NOT part of g).
template <class F>
cplx integrate_gaussian_weight(F&& g, int d, int n_per_axis) {
  std::vector<const QuadRule*> axes(d, &gauss_hermite(n_per_axis));
  const double s = std::pow(std::sqrt(2.0), d);
  cplx acc = 0;
  Vec x(d);
  tensor_for_each(axes, [&](const Vec& t, double w) {
    for (int i = 0; i < d; ++i) x(i) = std::sqrt(2.0) * t(i);
    acc += w * g(x);
  });
  return s * acc;
}

}  // namespace renewalab
