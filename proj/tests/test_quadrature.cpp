#include <catch2/catch_amalgamated.hpp>

#include "renewalab/quadrature.hpp"

using namespace renewalab;

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
  const auto& r = gauss_legendre(8);
  double s = 0;
  for (size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i];
  CHECK(s == Catch::Approx(2.0).epsilon(1e-14));
  // degree-15 monomial is exact for an 8-point rule
  double x14 = 0;
  for (size_t i = 0; i < r.nodes.size(); ++i) x14 += r.weights[i] * std::pow(r.nodes[i], 14);
  CHECK(x14 == Catch::Approx(2.0 / 15.0).epsilon(1e-13));
}

TEST_CASE("Gauss-Legendre handles large node counts") {
  const auto& r = gauss_legendre(500);
  double s = 0;
  for (double w : r.weights) s += w;
  CHECK(s == Catch::Approx(2.0).epsilon(1e-13));
  double quad = 0;
  for (size_t i = 0; i < r.nodes.size(); ++i) quad += r.weights[i] * r.nodes[i] * r.nodes[i];
  CHECK(quad == Catch::Approx(2.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("Gauss-Hermite moments") {
  const auto& r = gauss_hermite(32);
  double m0 = 0, m2 = 0;
  for (size_t i = 0; i < r.nodes.size(); ++i) {
    m0 += r.weights[i];
    m2 += r.weights[i] * r.nodes[i] * r.nodes[i];
  }
  CHECK(m0 == Catch::Approx(std::sqrt(pi)).epsilon(1e-13));
  CHECK(m2 == Catch::Approx(0.5 * std::sqrt(pi)).epsilon(1e-12));
}

TEST_CASE("integrate_box on a separable integrand") {
  Vec lo(2), hi(2);
  lo << 0.0, 0.0;
  hi << 1.0, 2.0;
  const cplx v = integrate_box([](const Vec& x) { return cplx(x(0) * x(1), 0.0); }, lo, hi, 12);
  CHECK(v.real() == Catch::Approx(1.0).epsilon(1e-13));  // (1/2) * (4/2)
  CHECK(std::abs(v.imag()) < 1e-15);
}

TEST_CASE("gaussian-weight tensor quadrature") {
  // E[x^2] under the standard 2-d Gaussian (unnormalized weight integrates to 2 pi)
  const cplx mass = integrate_gaussian_weight([](const Vec&) { return cplx(1.0, 0.0); }, 2, 40);
  CHECK(mass.real() == Catch::Approx(2.0 * pi).epsilon(1e-12));
  const cplx second = integrate_gaussian_weight([](const Vec& x) { return cplx(x(0) * x(0), 0.0); }, 2, 40);
  CHECK(second.real() == Catch::Approx(2.0 * pi).epsilon(1e-11));
}
