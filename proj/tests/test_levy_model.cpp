#include <doctest.h>

#include <cmath>
#include <random>

#include "levywave/errors.hpp"
#include "levywave/model.hpp"
#include "levywave/paths.hpp"
#include "levywave/stats.hpp"

using namespace levywave;

namespace {

LevyTriplet brownian(double sigma = 1.0, double b = 0.0) {
    return LevyTriplet(b, sigma);
}

LevyTriplet double_exp_model() {
    // symmetric two-sided exponential jumps, already centered
    return center(LevyTriplet(0.0, 1.0, JumpSpec{1.0, DoubleExpJump{0.5, 3.0, 3.0}}));
}

LevyTriplet asymmetric_discrete_model() {
    DiscreteJump d;
    d.atoms = {{-2.0, 0.2}, {1.0, 0.8}};
    return center(LevyTriplet(0.0, 1.0, JumpSpec{1.0, d}));
}

// Brute-force Legendre transform over a fine theta grid.
double legendre_grid_oracle(const LevyTriplet& m, double alpha, std::size_t n = 100000) {
    const auto [lo, hi] = m.theta_star();
    const double a = std::isinf(lo) ? -12.0 : lo + 1e-4 * (hi - lo > 0 ? 1 : 1) * std::abs(lo);
    const double b = std::isinf(hi) ? 12.0 : hi - 1e-4 * std::abs(hi);
    double best = -1e300;
    for (std::size_t i = 0; i <= n; ++i) {
        const double th = a + (b - a) * static_cast<double>(i) / static_cast<double>(n);
        best = std::max(best, alpha * th - m.psi(th));
    }
    return best;
}

} // namespace

TEST_SUITE("levy_model") {

TEST_CASE("psi closed forms and MGF oracle") {
    const auto bm = brownian();
    CHECK(bm.psi(1.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(bm.psi(0.0) == doctest::Approx(0.0).epsilon(1e-14));

    const auto de = double_exp_model();
    CHECK(de.psi(0.0) == doctest::Approx(0.0).epsilon(1e-12));

    // Monte Carlo MGF oracle: mean of e^{theta X_1} over exact unit
    // increments, 3-SE band.
    const double theta = 1.0;
    const std::size_t n = 1000000;
    const auto xs = sample_terminal(de, 0.0, 1.0, n, 424242);
    std::vector<double> ew(n);
    for (std::size_t i = 0; i < n; ++i) ew[i] = std::exp(theta * xs[i]);
    const MeanSE ms = mean_se(ew);
    const double target = std::exp(de.psi(theta));
    CHECK(std::abs(ms.mean - target) <= 3.0 * ms.se);
}

TEST_CASE("psi_prime closed forms and finite differences") {
    const auto bm = brownian();
    CHECK(bm.psi_prime(2.0) == doctest::Approx(2.0).epsilon(1e-14));

    const auto de = double_exp_model();
    CHECK(std::abs(de.psi_prime(0.0)) < 1e-12);

    const double h = 1e-5;
    for (double theta : {-1.5, -0.3, 0.7, 2.1}) {
        const double fd = (de.psi(theta + h) - de.psi(theta - h)) / (2.0 * h);
        CHECK(de.psi_prime(theta) == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("psi domain errors") {
    const auto de = double_exp_model();  // domain (-3, 3)
    CHECK_THROWS_AS(de.psi(3.0), DomainError);
    CHECK_THROWS_AS(de.psi(-3.5), DomainError);
    CHECK_THROWS_AS(de.psi_prime(4.0), DomainError);
}

TEST_CASE("center") {
    const auto bm = brownian();
    CHECK(center(bm).b() == doctest::Approx(0.0));
    CHECK(center(brownian(1.0, 0.7)).b() == doctest::Approx(0.0).epsilon(1e-14));

    const auto ad = asymmetric_discrete_model();
    CHECK(std::abs(ad.psi_prime(0.0)) < 1e-12);

    // MC mean oracle
    const auto xs = sample_terminal(ad, 0.0, 1.0, 400000, 7);
    const MeanSE ms = mean_se(xs);
    CHECK(std::abs(ms.mean) <= 3.0 * ms.se);
}

TEST_CASE("theta_star per family") {
    const auto bm = brownian();
    CHECK(std::isinf(bm.theta_star().first));
    CHECK(std::isinf(bm.theta_star().second));

    const LevyTriplet de(0.0, 1.0, JumpSpec{1.0, DoubleExpJump{0.5, 3.0, 5.0}});
    CHECK(de.theta_star().first == doctest::Approx(-5.0));
    CHECK(de.theta_star().second == doctest::Approx(3.0));

    const auto ad = asymmetric_discrete_model();
    CHECK(std::isinf(ad.theta_star().first));
    CHECK(std::isinf(ad.theta_star().second));

    // one-sided jumps leave the other side unbounded
    const LevyTriplet pos(0.0, 1.0, JumpSpec{1.0, DoubleExpJump{1.0, 2.0, 1.0}});
    CHECK(std::isinf(pos.theta_star().first));
    CHECK(pos.theta_star().second == doctest::Approx(2.0));
}

TEST_CASE("legendre closed form and grid oracle") {
    const auto bm = brownian();
    for (double cc : {0.1, 0.5, 1.0, 2.0, 5.0})
        CHECK(legendre(bm, cc) == doctest::Approx(cc * cc / 2.0).epsilon(1e-10));
    CHECK(legendre(bm, 0.0) == doctest::Approx(0.0));

    const auto de = double_exp_model();
    CHECK(legendre(de, 0.5) ==
          doctest::Approx(legendre_grid_oracle(de, 0.5)).epsilon(1e-6));
}

TEST_CASE("legendre_dual") {
    const auto de = double_exp_model();  // symmetric
    for (double a : {0.3, 0.9, 1.7})
        CHECK(legendre_dual(de, a) == doctest::Approx(legendre(de, a)).epsilon(1e-10));

    CHECK(legendre_dual(brownian(), 1.0) == doctest::Approx(0.5).epsilon(1e-12));

    const auto ad = asymmetric_discrete_model();
    const auto ad_dual = dual_reflect(ad);
    for (double a : {0.25, 0.8})
        CHECK(legendre_dual(ad, a) ==
              doctest::Approx(legendre_grid_oracle(ad_dual, a)).epsilon(1e-6));
}

TEST_CASE("gamma_inverse") {
    const auto bm = brownian();
    CHECK(gamma_inverse(bm, 1.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
    CHECK(gamma_inverse(bm, 0.0) == doctest::Approx(0.0));

    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> unif(0.01, 3.0);
    const auto de = double_exp_model();
    for (int i = 0; i < 20; ++i) {
        const double r = unif(rng);
        CHECK(legendre(de, gamma_inverse(de, r)) == doctest::Approx(r).epsilon(1e-8));
    }
}

TEST_CASE("qsd_theta roots and the boundary") {
    const auto bm = brownian();
    CHECK(qsd_theta(bm, 1.0, 0.5) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(qsd_theta(bm, 1.0, 0.375) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK_THROWS_AS(qsd_theta(bm, 1.0, 0.6), NoRoot);

    // residual and side of theta_c on random subcritical pairs
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const auto de = double_exp_model();
    for (int i = 0; i < 25; ++i) {
        const double c = 0.2 + 1.5 * unif(rng);
        const auto gp = gamma_point(de, c);
        const double r = gp.gamma * (0.05 + 0.9 * unif(rng));
        const double th = qsd_theta(de, c, r);
        CHECK(std::abs(de.psi(th) - c * th + r) < 1e-10);
        CHECK(th <= gp.theta_c + 1e-10);
    }
}

TEST_CASE("esscher_tilt") {
    const auto de = double_exp_model();
    const auto id = esscher_tilt(de, 0.0, 0.0);
    CHECK(id.process.mean() == doctest::Approx(de.mean()).epsilon(1e-12));
    CHECK(id.process.psi(1.2) == doctest::Approx(de.psi(1.2)).epsilon(1e-12));

    const auto bm = brownian();
    CHECK(esscher_tilt(bm, 1.0, 0.0).process.mean() == doctest::Approx(1.0));

    // tilted-sampler mean oracle
    const auto tilted = esscher_tilt(de, 0.8, 0.4);
    const auto xs = sample_terminal(tilted.process, 0.0, 1.0, 400000, 5150);
    const MeanSE ms = mean_se(xs);
    CHECK(std::abs(ms.mean - (de.psi_prime(0.8) - 0.4)) <= 3.0 * ms.se);

    // exponent semigroup identity on random u
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    const double theta = 0.7, c = 0.3;
    const auto tm = esscher_tilt(de, theta, c);
    for (int i = 0; i < 30; ++i) {
        const double u = unif(rng);
        CHECK(tm.process.psi(u) ==
              doctest::Approx(de.psi(theta + u) - de.psi(theta) - c * u).epsilon(1e-10));
    }
}

TEST_CASE("dual_reflect") {
    DiscreteJump single;
    single.atoms = {{1.0, 1.0}};
    const LevyTriplet one(0.0, 1.0, JumpSpec{0.5, single});
    const auto refl = dual_reflect(one);
    const auto& atoms = std::get<DiscreteJump>(refl.jumps().dist).atoms;
    REQUIRE(atoms.size() == 1);
    CHECK(atoms[0].first == doctest::Approx(-1.0));

    const auto ad = asymmetric_discrete_model();
    const auto twice = dual_reflect(dual_reflect(ad));
    for (double th : {-0.9, 0.2, 1.4})
        CHECK(twice.psi(th) == doctest::Approx(ad.psi(th)).epsilon(1e-12));

    const auto de = double_exp_model();
    for (double th : {-1.1, 0.4, 2.0})
        CHECK(dual_reflect(de).psi(th) == doctest::Approx(de.psi(th)).epsilon(1e-12));

    // dual exponent is the reflected exponent
    for (double th : {-0.8, 0.6})
        CHECK(dual_reflect(ad).psi(th) == doctest::Approx(ad.psi(-th)).epsilon(1e-12));
}

TEST_CASE("qsd_dual_process matches the stated generator data") {
    const auto de = double_exp_model();
    const double c = 1.0;
    const double theta = qsd_theta(de, c, 0.8 * gamma_point(de, c).gamma);
    const auto dual = qsd_dual_process(de, theta, c);
    CHECK(dual.process.mean() == doctest::Approx(c - de.psi_prime(theta)).epsilon(1e-10));
    CHECK(dual.process.sigma() == doctest::Approx(de.sigma()));
    CHECK(dual.process.mean() >= -1e-10);  // does not drift to -infinity
}

TEST_CASE("convexity and Fenchel-Young properties") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const auto models = {double_exp_model(), asymmetric_discrete_model()};
    for (const auto& m : models) {
        const auto [lo, hi] = m.theta_star();
        const double a = std::isinf(lo) ? -5.0 : 0.9 * lo;
        const double b = std::isinf(hi) ? 5.0 : 0.9 * hi;
        for (int i = 0; i < 50; ++i) {
            const double t1 = a + (b - a) * unif(rng);
            const double t2 = a + (b - a) * unif(rng);
            const double lam = unif(rng);
            CHECK(m.psi(lam * t1 + (1.0 - lam) * t2) <=
                  lam * m.psi(t1) + (1.0 - lam) * m.psi(t2) + 1e-12);
        }
        for (int i = 0; i < 50; ++i) {
            const double alpha = -2.0 + 4.0 * unif(rng);
            const double th = a + (b - a) * unif(rng);
            CHECK(alpha * th <= m.psi(th) + legendre(m, alpha) + 1e-10);
        }
        // equality at the conjugate point
        for (double alpha : {0.4, 1.1}) {
            const auto gp = gamma_point(m, alpha);
            CHECK(alpha * gp.theta_c - m.psi(gp.theta_c) ==
                  doctest::Approx(legendre(m, alpha)).epsilon(1e-8));
        }
    }
}

TEST_CASE("legendre is nonnegative, zero at zero, monotone on the right") {
    const auto de = double_exp_model();
    double prev = 0.0;
    CHECK(legendre(de, 0.0) == doctest::Approx(0.0));
    for (double a = 0.1; a <= 2.0; a += 0.1) {
        const double g = legendre(de, a);
        CHECK(g >= prev - 1e-12);
        CHECK(g >= 0.0);
        prev = g;
    }
}

TEST_CASE("model JSON round trip") {
    const std::string text = R"({
        "b": 0.0, "sigma": 1.0,
        "jump": {"rate": 1.0,
                 "dist": {"type": "double_exp", "p": 0.5,
                          "eta_plus": 3.0, "eta_minus": 3.0}},
        "center": true
    })";
    const auto m = model_from_json_text(text);
    CHECK(std::abs(m.psi_prime(0.0)) < 1e-12);
    const auto m2 = model_from_json_text(model_to_json_text(m));
    CHECK(m2.psi(0.7) == doctest::Approx(m.psi(0.7)).epsilon(1e-14));

    CHECK_THROWS_AS(model_from_json_text("{\"sigma\": 1.0}"), ConfigError);
    CHECK_THROWS_AS(model_from_json_text("{\"b\": 0, \"sigma\": -1}"), ConfigError);
    CHECK_THROWS_AS(model_from_json_text("not json"), ConfigError);
}

} // TEST_SUITE
