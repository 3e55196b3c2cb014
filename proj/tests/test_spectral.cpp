#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "renewalab/catalog.hpp"
#include "renewalab/spectral.hpp"

using namespace renewalab;

namespace {

FiniteChain one_state_chain(const Vec& v) {
  Mat p(1, 1);
  p << 1.0;
  Mat xi(1, v.size());
  xi.row(0) = v.transpose();
  Vec mu(1);
  mu << 1.0;
  return FiniteChain(p, xi, mu);
}

}  // namespace

TEST_CASE("fourier operator basics") {
  const FiniteChain chain = make_chain("chain-2state-2d");
  SECTION("t = 0 reproduces P") {
    const auto op = fourier_operator(chain, Vec::Zero(2));
    CHECK((op.M - chain.P.cast<cplx>()).norm() == 0.0);
  }
  SECTION("entrywise modulus bounded by P") {
    Vec t(2);
    t << 0.4, -0.9;
    const auto op = fourier_operator(chain, t);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) CHECK(std::abs(op.M(i, j)) <= chain.P(i, j) + 1e-15);
  }
  SECTION("one-state chain is the scalar exponential") {
    Vec v(2);
    v << 0.7, -0.2;
    const FiniteChain single = one_state_chain(v);
    Vec t(2);
    t << 0.3, 0.5;
    const auto op = fourier_operator(single, t);
    CHECK(std::abs(op.M(0, 0) - std::exp(cplx(0, t.dot(v)))) < 1e-15);
    // E_n(t) = e^{i n <t,v>}
    const cplx e3 = fourier_expectation(single, op, 3);
    CHECK(std::abs(e3 - std::exp(cplx(0, 3.0 * t.dot(v)))) < 1e-14);
  }
  SECTION("two-step expectation matches exhaustive enumeration") {
    Vec t(2);
    t << 0.37, -0.21;
    const auto op = fourier_operator(chain, t);
    const cplx direct = fourier_expectation(chain, op, 2);
    cplx exact = 0;
    oracles::enumerate_paths(chain, 2, [&](double prob, const std::vector<int>& states,
                                           const std::vector<Vec>& sums) {
      exact += prob * chain.f(states[2]) * std::exp(cplx(0, t.dot(sums[2])));
    });
    CHECK(std::abs(direct - exact) < 1e-14);
  }
  SECTION("semigroup property") {
    Vec t(2);
    t << 0.2, 0.1;
    const auto op = fourier_operator(chain, t);
    const CMat m2 = op.M * op.M;
    const CMat m3 = m2 * op.M;
    CHECK((m3 - op.M * m2).norm() < 1e-12);
  }
}

TEST_CASE("dominant eigen-triple") {
  const FiniteChain chain = make_chain("chain-3state-2d");
  SECTION("Perron data at t = 0") {
    const auto eig = dominant_eig(fourier_operator(chain, Vec::Zero(2)));
    CHECK(std::abs(eig.lambda - 1.0) < 1e-12);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(eig.right(i) - 1.0) < 1e-11);
    const Vec pi = stationary_dist(chain);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(eig.left(i) - pi(i)) < 1e-11);
  }
  SECTION("|lambda(t)| < 1 off zero, residual below 1e-11") {
    Vec t(2);
    t << 0.15, -0.1;
    const auto op = fourier_operator(chain, t);
    const auto eig = dominant_eig(op);
    CHECK(std::abs(eig.lambda) < 1.0);
    CHECK((op.M * eig.right - eig.lambda * eig.right).norm() / eig.right.norm() < 1e-11);
  }
  SECTION("matches the 2x2 closed form to 1e-10") {
    const FiniteChain two = make_chain("chain-2state-2d");
    Rng rng(11, 0);
    for (int rep = 0; rep < 25; ++rep) {
      Vec t(2);
      t << 0.4 * rng.uniform() - 0.2, 0.4 * rng.uniform() - 0.2;
      const auto op = fourier_operator(two, t);
      const auto eig = dominant_eig(op);
      CHECK(std::abs(eig.lambda - oracles::dominant_eig_2x2(op.M)) < 1e-10);
    }
  }
  SECTION("sub-dominant modulus matches the full solver") {
    Vec t(2);
    t << 0.1, 0.07;
    const auto op = fourier_operator(chain, t);
    const auto eig = dominant_eig(op);
    Eigen::ComplexEigenSolver<CMat> es(op.M);
    std::vector<double> mods;
    for (int i = 0; i < 3; ++i) mods.push_back(std::abs(es.eigenvalues()(i)));
    std::sort(mods.begin(), mods.end(), std::greater<>());
    CHECK(std::abs(eig.sub_modulus - mods[1]) < 1e-8);
  }
}

TEST_CASE("decomposition E_n = lambda^n L + R_n") {
  SECTION("t = 0, f = 1: L = 1 and R_n = 0") {
    const FiniteChain chain = make_chain("chain-3state-2d");
    const auto rep = decomposition_check(chain, Vec::Zero(2), 30);
    CHECK(std::abs(rep.L - 1.0) < 1e-11);
    for (const auto& row : rep.rows) CHECK(std::abs(row.remainder) < 1e-11);
  }
  SECTION("one-state chain has identically zero remainder") {
    Vec v(2);
    v << 1.0, 0.5;
    Vec t(2);
    t << 0.2, 0.3;
    const auto rep = decomposition_check(one_state_chain(v), t, 20);
    CHECK(rep.fitted_rate == 0.0);
    for (const auto& row : rep.rows) CHECK(std::abs(row.remainder) < 1e-12);
  }
  SECTION("remainder decays at the subdominant rate") {
    const FiniteChain chain = make_chain("chain-3state-2d");
    Vec t(2);
    t << 0.1, 0.07;
    const auto rep = decomposition_check(chain, t, 40);
    Eigen::ComplexEigenSolver<CMat> es(twisted_matrix(chain, t));
    std::vector<double> mods;
    for (int i = 0; i < 3; ++i) mods.push_back(std::abs(es.eigenvalues()(i)));
    std::sort(mods.begin(), mods.end(), std::greater<>());
    CHECK(std::abs(rep.fitted_rate - mods[1]) < 0.02);
  }
}

TEST_CASE("finite-difference Taylor data at zero") {
  SECTION("constant increments: gradient recovers the constant") {
    Mat p(2, 2);
    p << 0.3, 0.7, 0.6, 0.4;
    Mat xi(2, 2);
    xi << 1.5, -0.5, 1.5, -0.5;
    Vec mu(2);
    mu << 0.5, 0.5;
    const FiniteChain chain(p, xi, mu);
    const Vec g = grad_lambda_zero(chain);
    CHECK(std::abs(g(0) - 1.5) < 1e-7);
    CHECK(std::abs(g(1) + 0.5) < 1e-7);
  }
  SECTION("one-state chain: gradient v, Hessian v v^T") {
    Vec v(2);
    v << 0.8, -0.6;
    const FiniteChain single = one_state_chain(v);
    CHECK((grad_lambda_zero(single) - v).norm() < 1e-8);
    CHECK((hess_lambda_zero(single) - v * v.transpose()).norm() < 1e-7);
  }
  SECTION("3-state chain: cross-check against stationary quantities") {
    const FiniteChain chain = make_chain("chain-3state-2d");
    const Vec m = mean_vector(chain);
    CHECK((grad_lambda_zero(chain) - m).norm() < 1e-6);
    const Mat sigma = longrun_sigma(chain).sigma;
    CHECK((hess_lambda_zero(chain) - sigma).norm() < 1e-4);
  }
}

TEST_CASE("Taylor expansion residual order") {
  const FiniteChain rotated = rotate_chain_to_e1(make_chain("chain-3state-2d"));
  std::vector<Vec> samples;
  for (double r : {1e-1, 1e-2, 1e-3}) {
    Vec t1(2), t2(2);
    t1 << r, 0.0;
    t2 << 0.6 * r, 0.8 * r;
    samples.push_back(t1);
    samples.push_back(t2);
  }
  const auto rep = taylor_check(rotated, samples);
  CHECK(rep.fitted_order >= 2.5);
  for (const auto& row : rep.rows) CHECK(row.resid_scaled < 1.0);
}

TEST_CASE("band constants of v0 = 1 - lambda") {
  SECTION("one-state chain: scalar expansion along the drift axis") {
    // v0(t) = 1 - e^{i t_1}, so |v0|/|w| -> 1 along the t_1 axis; off the
    // axis the band degenerates because Sigma = v v^T is singular, and the
    // full-grid scan must report the failure.
    Vec v(2);
    v << 1.0, 0.0;
    const FiniteChain single = one_state_chain(v);
    for (double t1 : {0.2, 0.05, 0.01}) {
      Vec t(2);
      t << t1, 0.0;
      const double ratio = std::abs(1.0 - lambda_at(single, t)) / w_abs(t);
      CHECK(ratio > 0.9);
      CHECK(ratio < 1.1);
    }
    CHECK_THROWS_AS(v0_band_constants(single, 0.2), std::runtime_error);
  }
  SECTION("3-state chain keeps the band nondegenerate") {
    const FiniteChain rotated = rotate_chain_to_e1(make_chain("chain-3state-2d"));
    const auto band = v0_band_constants(rotated, 0.15);
    CHECK(band.alpha > 1e-4);
    CHECK(band.beta < 50.0);
    CHECK(band.alpha <= band.beta);
  }
}

TEST_CASE("lambda grid rows") {
  const FiniteChain chain = make_chain("chain-3state-2d");
  std::vector<Vec> ts;
  Vec t(2);
  t << 0.05, 0.02;
  ts.push_back(Vec::Zero(2));
  ts.push_back(t);
  const auto rows = lambda_grid(chain, ts);
  REQUIRE(rows.size() == 2);
  CHECK(std::abs(rows[0].lambda - 1.0) < 1e-12);
  CHECK(std::abs(rows[0].L - 1.0) < 1e-11);
  CHECK(std::abs(rows[1].lambda) < 1.0);
}
