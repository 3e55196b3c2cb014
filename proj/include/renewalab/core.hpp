#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace renewalab {

using Vec  = Eigen::VectorXd;
using Mat  = Eigen::MatrixXd;
using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

inline constexpr double pi = 3.14159265358979323846;

/// Critical moment order max((d-1)/2, 2) governing the dimension-dependent
/// regularity requirements.
inline double critical_order(int d) { return std::max(0.5 * (d - 1), 2.0); }

inline double sqr(double x) { return x * x; }

// ---------------------------------------------------------------------------
// One-dimensional order-2 jets (value, first and second derivative). Used to
// propagate analytic derivatives through the mollifier-based bump profiles.
// ---------------------------------------------------------------------------
struct Jet1 {
  double v = 0, d1 = 0, d2 = 0;
};

inline Jet1 operator+(const Jet1& a, const Jet1& b) { return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2}; }
inline Jet1 operator-(const Jet1& a, const Jet1& b) { return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2}; }
inline Jet1 operator*(const Jet1& a, const Jet1& b) {
  return {a.v * b.v, a.d1 * b.v + a.v * b.d1, a.d2 * b.v + 2 * a.d1 * b.d1 + a.v * b.d2};
}
inline Jet1 operator*(double c, const Jet1& a) { return {c * a.v, c * a.d1, c * a.d2}; }
inline Jet1 operator/(const Jet1& a, const Jet1& b) {
  const double q = a.v / b.v;
  const double q1 = (a.d1 - q * b.d1) / b.v;
  const double q2 = (a.d2 - 2 * q1 * b.d1 - q * b.d2) / b.v;
  return {q, q1, q2};
}

/// Jet of s -> exp(-1/s) for s > 0, identically 0 for s <= 0.
inline Jet1 expm_inv_jet(double s) {
  if (s <= 0) return {0, 0, 0};
  // guard against overflow of 1/s^4 for tiny s: the value underflows first
  if (s < 1e-2 && -1.0 / s < -745.0) return {0, 0, 0};
  const double v = std::exp(-1.0 / s);
  const double d1 = v / (s * s);
  const double d2 = v * (1.0 / (s * s * s * s) - 2.0 / (s * s * s));
  return {v, d1, d2};
}

/// Smooth transition: 0 for s <= 0, 1 for s >= 1, C-infinity in between.
inline Jet1 smoothstep_jet(double s) {
  if (s <= 0) return {0, 0, 0};
  if (s >= 1) return {1, 0, 0};
  const Jet1 g = expm_inv_jet(s);
  Jet1 h = expm_inv_jet(1.0 - s);
  h.d1 = -h.d1;  // chain rule for s -> 1-s
  return g / (g + h);
}

inline double smoothstep(double s) { return smoothstep_jet(s).v; }

// ---------------------------------------------------------------------------
// Multi-indices for partial derivatives, |beta| <= 2.
// ---------------------------------------------------------------------------
using MultiIndex = std::vector<int>;

/// All multi-indices of dimension d with |beta| <= max_order, graded order.
inline std::vector<MultiIndex> multi_indices_upto(int d, int max_order) {
  std::vector<MultiIndex> out;
  out.push_back(MultiIndex(d, 0));
  if (max_order >= 1) {
    for (int i = 0; i < d; ++i) {
      MultiIndex b(d, 0);
      b[i] = 1;
      out.push_back(b);
    }
  }
  if (max_order >= 2) {
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        MultiIndex b(d, 0);
        b[i] += 1;
        b[j] += 1;
        out.push_back(b);
      }
  }
  if (max_order >= 3) throw std::invalid_argument("multi_indices_upto: orders above 2 not supported");
  return out;
}

inline int mi_order(const MultiIndex& b) {
  int s = 0;
  for (int x : b) s += x;
  return s;
}

// ---------------------------------------------------------------------------
// Least-squares slope of y against x.
// ---------------------------------------------------------------------------
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_slope: need >= 2 points");
  const double n = double(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-300) throw std::runtime_error("fit_slope: degenerate abscissae");
  return (n * sxy - sx * sy) / denom;
}

}  // namespace renewalab
