#pragma once

#include "renewalab/core.hpp"

namespace renewalab {

// ---------------------------------------------------------------------------
// The anisotropic weight w(x) = -i x_1 + ||x'||^2 and the parabolic dilations
// D_k(x) = (x_1/4^k, x_2/2^k, ..., x_d/2^k) adapted to it.
// ---------------------------------------------------------------------------

/// w(x) = -i x_1 + ||x'||^2, x' = (x_2,...,x_d). Requires dimension >= 2.
inline cplx w_eval(const Vec& x) {
  if (x.size() < 2) throw std::invalid_argument("w_eval: dimension must be >= 2");
  return cplx(x.tail(x.size() - 1).squaredNorm(), -x(0));
}

inline double w_abs(const Vec& x) { return std::abs(w_eval(x)); }

/// Parabolic dilation D_k; k may be negative (inverse dilation).
/// Powers of two are applied with ldexp, so w(dilate(x,k)) = 4^{-k} w(x)
/// holds exactly in floating point.
inline Vec dilate(const Vec& x, int k) {
  Vec y(x.size());
  y(0) = std::ldexp(x(0), -2 * k);
  for (int i = 1; i < x.size(); ++i) y(i) = std::ldexp(x(i), -k);
  return y;
}

/// Orthogonal T with T m = ||m|| e_1, built as the Householder reflection
/// swapping m/||m|| and e_1 (identity when m is already along +e_1).
inline Mat rotation_to_e1(const Vec& m) {
  const int d = int(m.size());
  const double nm = m.norm();
  if (nm == 0.0) throw std::invalid_argument("rotation_to_e1: zero drift vector");
  Vec u = m / nm;
  Vec v = u;
  v(0) -= 1.0;
  const double vv = v.squaredNorm();
  if (vv < 1e-28) return Mat::Identity(d, d);
  return Mat::Identity(d, d) - (2.0 / vv) * (v * v.transpose());
}

// ---------------------------------------------------------------------------
// Symmetric positive-definite matrices with their eigen-factorization.
// ---------------------------------------------------------------------------
class SymPosDef {
public:
  explicit SymPosDef(const Mat& sigma) : sigma_(0.5 * (sigma + sigma.transpose())) {
    if (sigma.rows() != sigma.cols()) throw std::invalid_argument("SymPosDef: matrix not square");
    const double asym = (sigma - sigma.transpose()).norm();
    if (asym > 1e-12 * (1.0 + sigma.norm()))
      throw std::invalid_argument("SymPosDef: matrix not symmetric to 1e-12");
    Eigen::SelfAdjointEigenSolver<Mat> es(sigma_);
    evals_ = es.eigenvalues();
    evecs_ = es.eigenvectors();
    const double lmax = evals_.maxCoeff();
    if (lmax <= 0 || evals_.minCoeff() <= 1e-12 * lmax)
      throw std::invalid_argument("SymPosDef: near-singular matrix (min eigenvalue <= 1e-12 * max)");
  }

  int dim() const { return int(sigma_.rows()); }
  const Mat& matrix() const { return sigma_; }
  const Vec& eigenvalues() const { return evals_; }
  /// Orthogonal P with P diag(evals) P^T = sigma.
  const Mat& eigenvectors() const { return evecs_; }

  double det() const { return evals_.prod(); }

  /// Symmetric S with S * S * sigma = I.
  Mat inv_sqrt() const {
    return evecs_ * evals_.cwiseSqrt().cwiseInverse().asDiagonal() * evecs_.transpose();
  }

  Mat sqrt() const { return evecs_ * evals_.cwiseSqrt().asDiagonal() * evecs_.transpose(); }

private:
  Mat sigma_;
  Vec evals_;
  Mat evecs_;
};

inline Mat inv_sqrt(const SymPosDef& sigma) { return sigma.inv_sqrt(); }

/// Symmetric square root of a positive SEMI-definite matrix (eigenvalues
/// clipped at zero). Used for sampling from possibly degenerate Gaussians.
inline Mat psd_sqrt(const Mat& c) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (c + c.transpose()));
  Vec ev = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

// ---------------------------------------------------------------------------
// Anisotropic annuli: bands in |w(x)|.
//   gamma_k       : 4^{-(k+1)} <= |w| <= 4^{-k}
//   gamma_tilde_k : (1/8) 4^{-k} <= |w| <= 2 * 4^{-k}
//   general       : omega0 * 4^{-k} <= |w| <= omega1 * 4^{-k}
// ---------------------------------------------------------------------------
struct Annulus {
  enum class Kind { gamma, gamma_tilde, general };

  Kind kind = Kind::gamma;
  int k = 0;
  double omega0 = 0.25, omega1 = 1.0;  // used by Kind::general

  static Annulus gamma_k(int k) { return {Kind::gamma, k, 0.25, 1.0}; }
  static Annulus gamma_tilde_k(int k) { return {Kind::gamma_tilde, k, 0.125, 2.0}; }
  static Annulus general_band(double omega0, double omega1, int k = 0) {
    return {Kind::general, k, omega0, omega1};
  }

  double lower() const { return std::ldexp(band_lo(), -2 * k); }
  double upper() const { return std::ldexp(band_hi(), -2 * k); }

private:
  double band_lo() const { return kind == Kind::gamma ? 0.25 : omega0; }
  double band_hi() const { return kind == Kind::gamma ? 1.0 : (kind == Kind::gamma_tilde ? 2.0 : omega1); }
};

/// Closed-band membership test on |w(x)|. Boundary points belong to both
/// adjacent annuli; x = 0 belongs to none.
inline bool annulus_contains(const Annulus& ann, const Vec& x) {
  const double a = w_abs(x);
  if (a == 0.0) return false;
  return ann.lower() <= a && a <= ann.upper();
}

}  // namespace renewalab
