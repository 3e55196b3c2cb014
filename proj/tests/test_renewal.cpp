#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "renewalab/catalog.hpp"
#include "renewalab/renewal.hpp"

using namespace renewalab;

namespace {
Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}
}  // namespace

TEST_CASE("renewal constant") {
  SECTION("identity data gives C = 1") {
    CHECK(renewal_constant(1.0, vec2(1, 0), SymPosDef(Mat::Identity(2, 2)), Vec::Zero(2)) ==
          Catch::Approx(1.0).epsilon(1e-14));
  }
  SECTION("frak_A parallel to the drift does not change C") {
    Rng rng(5, 0);
    for (int rep = 0; rep < 20; ++rep) {
      Mat a(2, 2);
      for (int i = 0; i < 4; ++i) a(i / 2, i % 2) = rng.gaussian();
      const Mat sigma = a * a.transpose() + 0.3 * Mat::Identity(2, 2);
      const Vec m = vec2(rng.gaussian() + 2.0, rng.gaussian());
      const double c0 = renewal_constant(1.0, m, SymPosDef(sigma), Vec::Zero(2));
      const double cp = renewal_constant(1.0, m, SymPosDef(sigma), 3.7 * m);
      CHECK(cp == Catch::Approx(c0).epsilon(1e-12));
    }
  }
  SECTION("frak_A = 0 reduces to the closed corollary form") {
    Rng rng(6, 0);
    for (int rep = 0; rep < 20; ++rep) {
      Mat a(3, 3);
      for (int i = 0; i < 9; ++i) a(i / 3, i % 3) = rng.gaussian();
      const Mat sigma = a * a.transpose() + 0.3 * Mat::Identity(3, 3);
      Vec m(3);
      m << 1.0 + rng.uniform(), rng.gaussian(), rng.gaussian();
      const SymPosDef spd(sigma);
      const double c = renewal_constant(1.0, m, spd, Vec::Zero(3));
      const double closed = 1.0 / (std::sqrt(spd.det()) * (spd.inv_sqrt() * m).norm());
      CHECK(c == Catch::Approx(closed).epsilon(1e-12));
    }
  }
  SECTION("orthogonal conjugation invariance") {
    Rng rng(7, 0);
    for (int rep = 0; rep < 20; ++rep) {
      Mat a(3, 3);
      for (int i = 0; i < 9; ++i) a(i / 3, i % 3) = rng.gaussian();
      const Mat sigma = a * a.transpose() + 0.2 * Mat::Identity(3, 3);
      Vec m(3), fa(3);
      m << 2.0, -0.5, 0.7;
      fa << 0.3, 1.0, -0.2;
      Vec axis(3);
      for (int i = 0; i < 3; ++i) axis(i) = rng.gaussian();
      const Mat t = rotation_to_e1(axis);  // arbitrary orthogonal map
      const double c0 = renewal_constant(2.0, m, SymPosDef(sigma), fa);
      const double c1 = renewal_constant(2.0, t * m, SymPosDef(t * sigma * t.transpose()), t * fa);
      CHECK(c1 == Catch::Approx(c0).epsilon(1e-12));
    }
  }
  SECTION("transverse frak_A shrinks the constant") {
    const double c0 = renewal_constant(1.0, vec2(1, 0), SymPosDef(Mat::Identity(2, 2)), Vec::Zero(2));
    const double ct = renewal_constant(1.0, vec2(1, 0), SymPosDef(Mat::Identity(2, 2)), vec2(0, 2));
    CHECK(ct < c0);
    CHECK(ct == Catch::Approx(c0 * std::exp(-2.0)).epsilon(1e-12));
  }
  SECTION("domain errors") {
    CHECK_THROWS_AS(renewal_constant(1.0, Vec::Zero(2), SymPosDef(Mat::Identity(2, 2)), Vec::Zero(2)),
                    std::invalid_argument);
    CHECK_THROWS_AS(renewal_constant(0.0, vec2(1, 0), SymPosDef(Mat::Identity(2, 2)), Vec::Zero(2)),
                    std::invalid_argument);
  }
}

TEST_CASE("direction function") {
  const DirectionFunction dir(vec2(1, 0), vec2(0, 2));
  SECTION("constant b gives exact normalized offset") {
    const Vec a = direction_eval(dir, 400.0);
    CHECK(a(0) == Catch::Approx(400.0));
    CHECK(a(1) == Catch::Approx(2.0 * 20.0));
    const Vec offset = (a - 400.0 * dir.m) / std::sqrt(400.0);
    CHECK((offset - dir.frak_A).norm() < 1e-14);
  }
  SECTION("zero b gives a = tau m") {
    const DirectionFunction straight(vec2(1, 0), Vec::Zero(2));
    const Vec a = direction_eval(straight, 123.0);
    CHECK(a(0) == Catch::Approx(123.0));
    CHECK(a(1) == 0.0);
  }
  SECTION("vanishing perturbation keeps the limit") {
    const DirectionFunction wobble(vec2(1, 0), vec2(0, 2), [](double tau) {
      Vec b(2);
      b << 1.0 / tau, 2.0 + 1.0 / tau;
      return b;
    });
    const Vec a = direction_eval(wobble, 1e6);
    const Vec offset = (a - 1e6 * wobble.m) / 1e3;
    CHECK((offset - wobble.frak_A).norm() < 1e-2);
  }
  SECTION("tau must be positive") {
    CHECK_THROWS_AS(direction_eval(dir, 0.0), std::invalid_argument);
  }
}

TEST_CASE("target sets") {
  const TargetSet box = TargetSet::box(vec2(0.5, -1.0), vec2(1.0, 0.5));
  CHECK(box.lebesgue() == Catch::Approx(2.0));
  CHECK(box.contains(vec2(1.4, -0.6)));
  CHECK_FALSE(box.contains(vec2(1.6, -0.6)));
  CHECK(box.circumradius() == Catch::Approx(vec2(1.5, 1.5).norm()));

  const TargetSet ball = TargetSet::ball(vec2(1, 1), 2.0);
  CHECK(ball.lebesgue() == Catch::Approx(pi * 4.0));
  CHECK(ball.contains(vec2(2.5, 1.0)));
  CHECK_FALSE(ball.contains(vec2(3.5, 1.0)));
}

TEST_CASE("truncation horizon") {
  const TargetSet box = TargetSet::box(Vec::Zero(2), vec2(0.5, 0.5));
  SECTION("deterministic walk closed form") {
    const ARModel det = make_ar_model("deterministic-drift-2d");
    const DirectionFunction dir(mean_vector(det), Vec::Zero(2));
    const double tau = 100.0;
    const int n = truncation_horizon(det, tau, box, dir);
    const double q = tau * 1.0 + box.circumradius();
    CHECK(n == int(std::ceil(q)) + 1);
  }
  SECTION("monotone in the margin") {
    const ARModel model = make_ar_model("ar-gaussian-2d");
    const DirectionFunction dir(mean_vector(model), Vec::Zero(2));
    const int n12 = truncation_horizon(model, 100.0, box, dir, 12.0);
    const int n24 = truncation_horizon(model, 100.0, box, dir, 24.0);
    CHECK(n24 > n12);
  }
  SECTION("oversampled tail audit: no visits past the horizon") {
    const ARModel model = make_ar_model("ar-gaussian-2d");
    const Vec m = mean_vector(model);
    const DirectionFunction dir(m, Vec::Zero(2));
    const double tau = 100.0;
    const int n_max = truncation_horizon(model, tau, box, dir);
    const Vec shift = direction_eval(dir, tau);
    long long late_visits = 0;
    for (int p = 0; p < 100000; ++p) {
      Rng rng(998, std::uint64_t(p));
      Vec x = model.sample_initial(rng);
      Vec sum = Vec::Zero(2);
      for (int n = 1; n <= 2 * n_max; ++n) {
        x = model.step(x, rng);
        sum += x;
        if (n > n_max && box.contains(sum - shift)) ++late_visits;
      }
    }
    CHECK(late_visits == 0);
  }
}

TEST_CASE("Monte Carlo renewal estimator") {
  SECTION("empty box gives zero") {
    const ARModel model = make_ar_model("ar-gaussian-2d");
    const DirectionFunction dir(mean_vector(model), Vec::Zero(2));
    const TargetSet empty = TargetSet::box(Vec::Zero(2), Vec::Zero(2));
    // a zero-volume box is never hit by a continuous walk
    const auto est = mc_renewal_measure(model, empty, dir, 50.0, 2000, 1);
    CHECK(est.v_hat == 0.0);
    CHECK(est.std_err == 0.0);
  }
  SECTION("box far off the drift axis is almost never hit") {
    const ARModel model = make_ar_model("ar-gaussian-2d");
    const DirectionFunction dir(mean_vector(model), Vec::Zero(2));
    const TargetSet far = TargetSet::box(vec2(0.0, 200.0), vec2(0.5, 0.5));
    const auto est = mc_renewal_measure(model, far, dir, 50.0, 2000, 1);
    CHECK(est.v_hat == 0.0);
  }
  SECTION("lattice chain is refused") {
    const FiniteChain lattice = make_chain("chain-2state-lattice");
    const DirectionFunction dir(mean_vector(lattice), Vec::Zero(2));
    const TargetSet box = TargetSet::box(Vec::Zero(2), vec2(0.5, 0.5));
    CHECK_THROWS_AS(mc_renewal_measure(lattice, box, dir, 50.0, 1000, 1), std::runtime_error);
  }
  SECTION("path budget below 100 is refused") {
    const ARModel model = make_ar_model("ar-gaussian-2d");
    const DirectionFunction dir(mean_vector(model), Vec::Zero(2));
    const TargetSet box = TargetSet::box(Vec::Zero(2), vec2(0.5, 0.5));
    CHECK_THROWS_AS(mc_renewal_measure(model, box, dir, 50.0, 50, 1), std::invalid_argument);
  }
  SECTION("deterministic drift: exact hand-counted visits") {
    const ARModel det = make_ar_model("deterministic-drift-2d");
    const DirectionFunction dir(mean_vector(det), Vec::Zero(2));
    // slab of half-width 2.5 around the axis: S_n - (tau, 0) = (n - tau, 0)
    const TargetSet slab = TargetSet::box(Vec::Zero(2), vec2(2.5, 10.0));
    const double tau = 100.0;
    const auto est = mc_renewal_measure(det, slab, dir, tau, 500, 9);
    // integers in [97.5, 102.5]: 98..102, five visits on every path
    const double expected = std::pow(2.0 * pi * tau, 0.5) * 5.0;
    CHECK(est.v_hat == Catch::Approx(expected).epsilon(1e-12));
    CHECK(est.std_err == 0.0);
  }
  SECTION("truncated sums match exhaustive enumeration within 4 standard errors") {
    const FiniteChain chain = make_chain("chain-2state-2d");
    const TargetSet box = TargetSet::box(vec2(4.0, 4.0), vec2(1.0, 1.0));
    const Vec shift = Vec::Zero(2);
    const double exact = oracles::exact_renewal_sum(chain, box, shift, 10);
    const auto [mean, se] = mc_renewal_sum(chain, box, shift, 10, 200000, 31);
    CHECK(std::abs(mean - exact) < 4.0 * se);
  }
  SECTION("additivity over disjoint sets with the same seed") {
    const ARModel model = make_ar_model("ar-gaussian-2d");
    const DirectionFunction dir(mean_vector(model), Vec::Zero(2));
    const TargetSet left = TargetSet::box(vec2(-0.75, 0.0), vec2(0.75, 1.0));
    const TargetSet right = TargetSet::box(vec2(0.75, 0.0), vec2(0.75, 1.0));
    const TargetSet both = TargetSet::box(vec2(0.0, 0.0), vec2(1.5, 1.0));
    const double tau = 60.0;
    const auto ea = mc_renewal_measure(model, left, dir, tau, 20000, 4);
    const auto eb = mc_renewal_measure(model, right, dir, tau, 20000, 4);
    const auto eab = mc_renewal_measure(model, both, dir, tau, 20000, 4);
    // f = 1 visit counts are small integers: the raw totals add exactly
    CHECK(eab.raw_total == ea.raw_total + eb.raw_total);
    CHECK(eab.v_hat == Catch::Approx(ea.v_hat + eb.v_hat).epsilon(1e-14));
  }
  SECTION("doubling the path budget shrinks the standard error like 1/sqrt(2)") {
    const ARModel model = make_ar_model("ar-gaussian-2d");
    const DirectionFunction dir(mean_vector(model), Vec::Zero(2));
    const TargetSet box = TargetSet::box(Vec::Zero(2), vec2(0.5, 0.5));
    const auto e1 = mc_renewal_measure(model, box, dir, 60.0, 40000, 11);
    const auto e2 = mc_renewal_measure(model, box, dir, 60.0, 80000, 11);
    const double ratio = e1.std_err / e2.std_err;
    CHECK(ratio > std::sqrt(2.0) * 0.8);
    CHECK(ratio < std::sqrt(2.0) * 1.2);
  }
  SECTION("estimates are independent of the worker count") {
    const ARModel model = make_ar_model("ar-gaussian-2d");
    const DirectionFunction dir(mean_vector(model), Vec::Zero(2));
    const TargetSet box = TargetSet::box(Vec::Zero(2), vec2(0.5, 0.5));
    const auto w1 = mc_renewal_measure(model, box, dir, 60.0, 20000, 13, 1);
    const auto w4 = mc_renewal_measure(model, box, dir, 60.0, 20000, 13, 4);
    CHECK(w1.v_hat == w4.v_hat);
    CHECK(w1.std_err == w4.std_err);
  }
  SECTION("ratio to theory is sane at moderate tau") {
    const ARModel model = make_ar_model("ar-gaussian-2d");
    const DirectionFunction dir(mean_vector(model), Vec::Zero(2));
    const TargetSet box = TargetSet::box(Vec::Zero(2), vec2(0.5, 0.5));
    const auto est = mc_renewal_measure(model, box, dir, 100.0, 40000, 21);
    CHECK(est.theory == Catch::Approx(0.8).epsilon(1e-12));
    CHECK(est.v_hat / est.theory > 0.75);
    CHECK(est.v_hat / est.theory < 1.25);
  }
}

TEST_CASE("convergence study emits one row per tau") {
  const ARModel det = make_ar_model("deterministic-drift-2d");
  const DirectionFunction dir(mean_vector(det), Vec::Zero(2));
  const TargetSet slab = TargetSet::box(Vec::Zero(2), vec2(2.5, 10.0));
  const auto rows = convergence_study(det, slab, dir, {50.0}, 200, 3);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].tau == 50.0);
}
