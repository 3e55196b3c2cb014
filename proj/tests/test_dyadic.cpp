#include <catch2/catch_amalgamated.hpp>

#include "renewalab/catalog.hpp"
#include "renewalab/dyadic.hpp"

using namespace renewalab;

namespace {

/// Random point with |w| rescaled to a target value (anisotropic scaling).
Vec point_with_w(Rng& rng, int d, double target) {
  Vec x(d);
  for (int i = 0; i < d; ++i) x(i) = 2.0 * rng.uniform() - 1.0;
  double s = w_abs(x);
  while (s == 0) {
    for (int i = 0; i < d; ++i) x(i) = 2.0 * rng.uniform() - 1.0;
    s = w_abs(x);
  }
  const double alpha = target / s;
  Vec y(d);
  y(0) = x(0) * alpha;
  for (int i = 1; i < d; ++i) y(i) = x(i) * std::sqrt(alpha);
  return y;
}

}  // namespace

TEST_CASE("partition of unity") {
  DyadicPartition part(2);
  SECTION("phi is at least 1 with at most 3 window terms") {
    Rng rng(8, 0);
    for (int rep = 0; rep < 100000; ++rep) {
      const double target = std::pow(10.0, -12.0 + 18.0 * rng.uniform());
      const Vec x = point_with_w(rng, 2, target);
      const double phi = part.phi_eval(x);
      CHECK(phi >= 1.0 - 1e-12);
      CHECK(phi <= 3.0 + 1e-12);
      CHECK(part.window_count(x) <= 3);
      CHECK(std::abs(part.partition_sum(x) - 1.0) < 1e-10);
    }
  }
  SECTION("phi is dilation invariant") {
    Rng rng(9, 0);
    for (int rep = 0; rep < 2000; ++rep) {
      const Vec x = point_with_w(rng, 2, std::pow(10.0, -3.0 + 6.0 * rng.uniform()));
      const int ell = int(rng.next_u64() % 7) - 3;
      CHECK(std::abs(part.phi_eval(dilate(x, ell)) - part.phi_eval(x)) < 1e-12);
    }
  }
  SECTION("gamma equals 1 on the core annulus") {
    Rng rng(10, 0);
    for (int rep = 0; rep < 2000; ++rep) {
      const Vec x = point_with_w(rng, 2, 0.25 + 0.75 * rng.uniform());
      CHECK(part.gamma()(x) == 1.0);
      CHECK(part.phi_eval(x) >= 1.0);
    }
  }
  SECTION("rho vanishes outside gamma_tilde_0") {
    Rng rng(12, 0);
    for (int rep = 0; rep < 2000; ++rep) {
      const double target = rng.uniform() < 0.5 ? 0.01 * rng.uniform() + 1e-6 : 2.5 + 5.0 * rng.uniform();
      const Vec x = point_with_w(rng, 2, target);
      CHECK(std::abs(part.rho().value(x)) == 0.0);
    }
  }
  SECTION("x = 0 is a domain error") {
    CHECK_THROWS_AS(part.phi_eval(Vec::Zero(2)), std::invalid_argument);
    CHECK_THROWS_AS(part.partition_sum(Vec::Zero(2)), std::invalid_argument);
  }
  SECTION("three dimensions") {
    DyadicPartition p3(3);
    Rng rng(13, 0);
    for (int rep = 0; rep < 20000; ++rep) {
      const double target = std::pow(10.0, -9.0 + 12.0 * rng.uniform());
      const Vec x = point_with_w(rng, 3, target);
      CHECK(std::abs(p3.partition_sum(x) - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("catalog jets agree with finite differences") {
  Rng rng(21, 0);
  for (const std::string name :
       {"theta-x2", "theta-jet3", "theta-cone", "v-quadratic", "v-surrogate", "u-bump"}) {
    const FuncHandle u = make_test_function(name, 2);
    std::vector<Vec> pts;
    for (int i = 0; i < 10; ++i) {
      Vec x(2);
      // keep clear of the cutoff edges where finite differences straddle kinks
      x << 0.35 * rng.uniform() + 0.02, 0.35 * rng.uniform() + 0.02;
      pts.push_back(x);
    }
    INFO(name);
    CHECK(check_derivatives(u, pts) < 1e-4);
  }
  // the partition bump on its own annulus
  DyadicPartition part(2);
  std::vector<Vec> pts;
  const Region region = Region::gamma_tilde0(2);
  Rng rng2(22, 0);
  for (int i = 0; i < 10; ++i) pts.push_back(region.sample(rng2));
  CHECK(check_derivatives(part.rho(), pts) < 1e-4);
}

TEST_CASE("empirical Hoelder seminorms") {
  const Region ball = Region::ball(Vec::Zero(2), 1.0);
  SECTION("constants have zero seminorm") {
    auto c = [](const Vec&) { return cplx(3.7, 0.0); };
    CHECK(holder_seminorm(c, 0.5, ball, 4000) == 0.0);
  }
  SECTION("linear coordinate has Lipschitz seminorm 1") {
    auto g = [](const Vec& x) { return cplx(x(0), 0.0); };
    const double est = holder_seminorm(g, 1.0, ball, 20000);
    CHECK(est >= 0.99);
    CHECK(est <= 1.0 + 1e-12);
  }
  SECTION("sqrt(|x_1|) attains its 1/2-seminorm near the axis") {
    auto g = [](const Vec& x) { return cplx(std::sqrt(std::abs(x(0))), 0.0); };
    const double est = holder_seminorm(g, 0.5, ball, 40000);
    CHECK(est >= 0.95);
  }
  SECTION("estimates are monotone in the budget") {
    auto g = [](const Vec& x) { return cplx(std::cos(3.0 * x(0)) * x(1), 0.0); };
    const double e1 = holder_seminorm(g, 0.5, ball, 2000);
    const double e2 = holder_seminorm(g, 0.5, ball, 8000);
    const double e3 = holder_seminorm(g, 0.5, ball, 32000);
    CHECK(e1 <= e2);
    CHECK(e2 <= e3);
  }
}

TEST_CASE("empirical C_b^m norms") {
  const Region ball = Region::ball(Vec::Zero(2), 1.0);
  SECTION("constant function") {
    const FuncHandle c = constant_handle(2, cplx(-2.5, 0.0));
    const CbmNorm n = cbm_norm(c, 2.0, ball, 2000);
    CHECK(n.total == Catch::Approx(2.5).epsilon(1e-12));
  }
  SECTION("x_1^2 on the unit ball sums to 5") {
    const FuncHandle x1 = coordinate_handle(2, 0);
    const FuncHandle sq = product(x1, x1);
    const CbmNorm n2 = cbm_norm(sq, 2.0, ball, 4000);
    CHECK(n2.total == Catch::Approx(5.0).margin(0.01));
    CHECK(n2.holder_top == 0.0);
    // fractional order only adds seminorms of the (constant) second
    // derivatives, which vanish
    const CbmNorm n25 = cbm_norm(sq, 2.5, ball, 4000);
    CHECK(n25.total == Catch::Approx(5.0).margin(0.01));
  }
  SECTION("orders above the jet catalog are refused") {
    const FuncHandle x1 = coordinate_handle(2, 0);
    CHECK_THROWS_AS(cbm_norm(x1, 3.5, ball, 100), std::invalid_argument);
  }
}

TEST_CASE("scaling laws of dilated families") {
  const int k0 = k0_for_radius(0.5);
  SECTION("theta family decays like 2^{-k}") {
    const auto table = scaled_norm_table(make_theta_x2(2), ScaledKind::theta, k0_for_radius(1.0),
                                         k0_for_radius(1.0) + 6, 2.5, 1500, 100);
    CHECK(table.fitted_slope <= -1.0 + 0.15);
  }
  SECTION("vanishing-jet theta decays like 2^{-k(2+nu)}") {
    const auto table = scaled_norm_table(make_theta_jet3(2), ScaledKind::theta2, k0_for_radius(1.0),
                                         k0_for_radius(1.0) + 6, 2.5, 1500, 101);
    CHECK(table.fitted_slope <= -(2.0 + 0.5) + 0.15);
  }
  SECTION("v family decays like 4^{-k}") {
    const auto table = scaled_norm_table(make_v_quadratic(2), ScaledKind::v, k0, k0 + 6, 2.5, 1500, 102);
    CHECK(table.fitted_slope <= -2.0 + 0.15);
  }
  SECTION("1/v family grows at most like 4^{k}") {
    const auto table = scaled_norm_table(make_v_quadratic(2), ScaledKind::inv_v, k0, k0 + 6, 2.5, 1500, 103);
    CHECK(table.fitted_slope <= 2.0 + 0.15);
    CHECK(table.fitted_slope >= 1.0);  // the quotient really grows
  }
  SECTION("k below k0 is a domain-coverage error") {
    CHECK_THROWS_AS(scaled_norm_table(make_v_quadratic(2), ScaledKind::v, 0, 6, 2.5, 100, 1),
                    std::invalid_argument);
  }
}

TEST_CASE("localized quotient norm laws") {
  const int k0 = k0_for_radius(0.5);
  const FuncHandle v = make_v_quadratic(2);
  SECTION("psi_k grows at most like 2^k") {
    const auto table = psi_k_norm_law(make_theta_x2(2), v, nullptr, k0, k0 + 6, 2.5, 1500, 104);
    CHECK(table.fitted_slope <= 1.0 + 0.15);
  }
  SECTION("psi_k law also holds at m = 1") {
    const auto table = psi_k_norm_law(make_theta_x2(2), v, nullptr, k0, k0 + 6, 1.0, 1500, 105);
    CHECK(table.fitted_slope <= 1.0 + 0.15);
  }
  SECTION("psi-tilde with the double quotient grows at most like 2^{k(2-nu)}") {
    const auto table = psi_k_norm_law(make_theta_jet3(2), v, &v, k0, k0 + 6, 2.5, 1500, 106);
    CHECK(table.fitted_slope <= (2.0 - 0.5) + 0.15);
  }
  SECTION("theta = 0 gives identically zero norms") {
    const FuncHandle zero = constant_handle(2, 0.0, 1.0);
    const auto table = psi_k_norm_law(zero, v, nullptr, k0, k0 + 6, 2.5, 200, 107);
    for (const auto& row : table.rows) CHECK(row.norm.total == 0.0);
  }
  SECTION("surrogate v variant stays within the law") {
    const auto table = psi_k_norm_law(make_theta_x2(2), make_v_surrogate(2), nullptr, k0, k0 + 6, 2.5,
                                      1500, 108);
    CHECK(table.fitted_slope <= 1.0 + 0.15);
  }
}

TEST_CASE("dyadic Fourier decay") {
  const FuncHandle theta = make_theta_cone(2);
  const FuncHandle v = make_v_quadratic(2);
  SECTION("zero numerator transforms to zero") {
    const FuncHandle zero = constant_handle(2, 0.0, 1.0);
    DyadicPartition part(2);
    auto q = [&](const Vec&) -> cplx { return 0.0; };
    const auto res = dyadic_fourier(q, part, 2, k0_for_radius(1.0), Vec::Ones(2));
    CHECK(std::abs(res.value) == 0.0);
  }
  SECTION("dyadic sum matches the direct band oracle at moderate frequencies") {
    DyadicPartition part(2);
    const int k0 = k0_for_radius(0.5);
    auto q = [&](const Vec& x) -> cplx {
      const cplx th = theta.value(x);
      if (th == 0.0) return 0.0;
      return th / v.value(x);
    };
    const double w_out = std::ldexp(1.0, -2 * (k0 + 1));
    for (double mag : {10.0, 30.0, 50.0}) {
      Vec a(2);
      a << mag, 0.0;
      const cplx dyadic = dyadic_fourier(q, part, 2, k0, a, 32).value;
      const cplx direct = direct_band_fourier_2d(q, w_out, a, 14, 32, 24);
      CHECK(std::abs(dyadic - direct) < 0.02 * std::abs(direct));
    }
  }
  SECTION("scaled transform decays along the drift ray") {
    const auto rep = fourier_decay_check(theta, v, nullptr, {Vec::Unit(2, 0)}, {50.0, 100.0, 200.0, 400.0},
                                         24, false);
    REQUIRE(rep.rays.size() == 1);
    const auto& rows = rep.rays.front();
    CHECK(rows.back().scaled <= 0.7 * rows.front().scaled);
    CHECK(rep.decay_ok);
  }
  SECTION("theta supported off the cone is rejected") {
    CHECK_THROWS_AS(fourier_decay_check(make_theta_x2(2), v, nullptr, {Vec::Unit(2, 0)}, {10.0}),
                    std::invalid_argument);
  }
  SECTION("shell L1 masses sum to the direct mass") {
    const auto rep = dyadic_l1_report(theta, v, nullptr);
    CHECK(rep.dyadic_total > 0);
    CHECK(std::abs(rep.dyadic_total - rep.direct_total) < 0.01 * rep.direct_total);
    // integrable singularity: shell masses decay geometrically
    const auto& s = rep.shell_mass;
    REQUIRE(s.size() >= 3);
    CHECK(s[s.size() - 1] < s[0]);
  }
}

TEST_CASE("classical transform bound") {
  const FuncHandle u = make_u_bump(2);
  SECTION("scaled transform stays bounded and stable under range doubling") {
    const auto rep = cm_fourier_bound_check(u, 2.0, Vec::Unit(2, 0),
                                            {1, 2, 5, 10, 20, 50, 100, 150, 200});
    CHECK(rep.empirical_sup > 0);
    CHECK(rep.stable);
  }
  SECTION("translation changes the transform by a phase only") {
    Vec lo = Vec::Constant(2, -1.0), hi = Vec::Constant(2, 1.0);
    Vec shift(2);
    shift << 0.17, -0.09;
    Vec a(2);
    a << 7.0, 3.0;
    const cplx uh = integrate_box(
        [&](const Vec& t) { return u.value(t) * std::exp(cplx(0, -t.dot(a))); }, lo, hi, 64);
    Vec lo2 = lo + shift, hi2 = hi + shift;
    const cplx uh_shift = integrate_box(
        [&](const Vec& t) { return u.value(t - shift) * std::exp(cplx(0, -t.dot(a))); }, lo2, hi2, 64);
    CHECK(std::abs(std::abs(uh_shift) - std::abs(uh)) < 1e-8);
  }
  SECTION("zero function transforms to zero") {
    const auto rep = cm_fourier_bound_check(constant_handle(2, 0.0, 0.8), 2.0, Vec::Unit(2, 0), {5, 10});
    CHECK(rep.empirical_sup == 0.0);
  }
}

TEST_CASE("product rule for Hoelder seminorms") {
  SECTION("constant times g is the equality case") {
    const Region ball = Region::ball(Vec::Zero(2), 1.0);
    const auto rep = product_holder_check(constant_handle(2, 2.0, 1.0), make_u_bump(2), 0.5, ball, 4000);
    CHECK(rep.holds);
    CHECK(rep.fg_semi == Catch::Approx(2.0 * rep.g_semi).epsilon(1e-9));
  }
  SECTION("f = g = x_1 on the unit segment region") {
    Vec lo(2), hi(2);
    lo << 0.0, 0.0;
    hi << 1.0, 0.0;
    const Region seg = Region::box(lo, hi);
    const FuncHandle x1 = coordinate_handle(2, 0);
    const auto rep = product_holder_check(x1, x1, 1.0, seg, 8000);
    CHECK(rep.fg_semi == Catch::Approx(2.0).margin(0.02));
    CHECK(rep.holds);
  }
  SECTION("random smooth pairs satisfy the inequality") {
    const Region ball = Region::ball(Vec::Zero(2), 1.0);
    const auto rep1 = product_holder_check(make_theta_x2(2), make_u_bump(2), 0.5, ball, 6000);
    CHECK(rep1.holds);
    const auto rep2 = product_holder_check(make_v_quadratic(2), make_u_bump(2), 1.0, ball, 6000);
    CHECK(rep2.holds);
  }
}
