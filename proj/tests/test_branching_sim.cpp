#include <doctest.h>

#include <cmath>
#include <map>

#include "levywave/branching.hpp"
#include "levywave/model.hpp"
#include "levywave/paths.hpp"
#include "levywave/stats.hpp"

using namespace levywave;

namespace {

LevyTriplet brownian() { return LevyTriplet(0.0, 1.0); }

LevyTriplet double_exp_model() {
    return center(LevyTriplet(0.0, 1.0, JumpSpec{1.0, DoubleExpJump{0.5, 3.0, 3.0}}));
}

} // namespace

TEST_SUITE("branching_sim") {

TEST_CASE("population is a Yule process: mean and geometric fit") {
    BranchingConfig cfg;
    cfg.r = 0.5;
    cfg.t_max = 2.0;
    cfg.dt = 0.05;
    cfg.seed = 101;

    const std::size_t n_runs = 10000;
    std::vector<double> counts(n_runs);
    std::map<std::size_t, std::size_t> histogram;
    for (std::size_t run = 0; run < n_runs; ++run) {
        const auto snaps = run_blp(brownian(), 0.0, cfg, run);
        const std::size_t n = snaps.back().particles.size();
        counts[run] = static_cast<double>(n);
        ++histogram[n];
    }
    const MeanSE ms = mean_se(counts);
    CHECK(std::abs(ms.mean - std::exp(0.5 * 2.0)) <= 3.0 * ms.se);

    // N_t ~ Geometric(e^{-rt}) on {1, 2, ...}; chi-square GOF at the 1% level
    const double q = std::exp(-0.5 * 2.0);
    std::vector<double> observed, expected;
    double tail_obs = static_cast<double>(n_runs), tail_exp = n_runs;
    std::size_t k = 1;
    while (true) {
        const double pk = q * std::pow(1.0 - q, static_cast<double>(k - 1));
        const double ek = n_runs * pk;
        if (ek < 5.0 || tail_exp - ek < 5.0) break;
        const auto it = histogram.find(k);
        const double ok = it == histogram.end() ? 0.0 : static_cast<double>(it->second);
        observed.push_back(ok);
        expected.push_back(ek);
        tail_obs -= ok;
        tail_exp -= ek;
        ++k;
    }
    observed.push_back(tail_obs);
    expected.push_back(tail_exp);
    double chi2 = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i)
        chi2 += (observed[i] - expected[i]) * (observed[i] - expected[i]) / expected[i];
    CHECK(chi2 < chi2_upper_quantile(static_cast<double>(observed.size() - 1), 0.01));
}

TEST_CASE("vanishing branching rate degenerates to a single path") {
    BranchingConfig cfg;
    cfg.r = 1e-12;
    cfg.t_max = 2.0;
    cfg.dt = 0.1;
    cfg.seed = 7;
    const auto snaps = run_blp(brownian(), 0.3, cfg);
    REQUIRE(snaps.back().particles.size() == 1);
    CHECK(snaps.back().total_born == 1);
}

TEST_CASE("branching preserves the motion law of a random particle") {
    const auto de = double_exp_model();
    BranchingConfig cfg;
    cfg.r = 0.5;
    cfg.t_max = 1.5;
    cfg.dt = 0.05;
    cfg.seed = 301;

    const std::size_t n_runs = 4000;
    std::vector<double> picked;
    picked.reserve(n_runs);
    for (std::size_t run = 0; run < n_runs; ++run) {
        const auto snaps = run_blp(de, 0.0, cfg, run);
        const auto& parts = snaps.back().particles;
        Rng rng = make_stream(cfg.seed ^ 0xABCDULL, run);
        std::uniform_int_distribution<std::size_t> pick(0, parts.size() - 1);
        picked.push_back(parts[pick(rng)]);
    }
    const auto single = sample_terminal(de, 0.0, 1.5, n_runs, 999);
    const EmpiricalDistribution a(picked), b(single);
    // two-sample KS, 1% critical value 1.63 sqrt(2/n)
    CHECK(a.ks_to(b) < 1.63 * std::sqrt(2.0 / static_cast<double>(n_runs)));
}

TEST_CASE("killed branching: outcome invariants and immediate extinction") {
    BranchingConfig cfg;
    cfg.r = 0.4;
    cfg.t_max = 30.0;
    cfg.dt = 0.05;
    cfg.cap = 20000;
    cfg.seed = 55;

    std::size_t extinct = 0;
    for (std::size_t run = 0; run < 50; ++run) {
        const auto res = run_blp_killed(brownian(), 1.0, 1.0, cfg, run);
        if (res.outcome.kind == ExtinctionKind::Extinct) {
            ++extinct;
            CHECK(res.final_state.particles.empty());
        } else if (res.outcome.kind == ExtinctionKind::SurvivedCap) {
            CHECK(res.final_state.particles.size() >= cfg.cap);
        }
    }
    CHECK(extinct >= 45);  // r = 0.4 < Gamma(1) = 0.5: subcritical

    // x0 near the barrier with a strong drift: instant extinction
    std::size_t instant = 0;
    for (std::size_t run = 0; run < 100; ++run) {
        BranchingConfig c2 = cfg;
        c2.t_max = 5.0;
        const auto res = run_blp_killed(brownian(), 3.0, 1e-4, c2, run);
        if (res.outcome.kind == ExtinctionKind::Extinct && res.outcome.time <= 1.0)
            ++instant;
    }
    CHECK(instant >= 99);
}

TEST_CASE("phase smoke: extinct below the boundary, cap above it") {
    BranchingConfig cfg;
    cfg.t_max = 50.0;
    cfg.dt = 0.05;
    cfg.cap = 20000;
    cfg.seed = 77;

    const auto sub = extinction_scan(brownian(), 1.0, 0.3, 1.0, 60, cfg);
    CHECK(sub.extinct_frac >= 0.95);
    CHECK(sub.survived_frac == doctest::Approx(0.0));

    // From x0 = 4 the survival probability at (c=1, r=0.8) is ~0.42 (BVP
    // oracle of (1/2)u'' - cu' + ru(1-u) = 0); from x0 = 1 it is only ~0.024.
    const auto super = extinction_scan(brownian(), 1.0, 0.8, 4.0, 60, cfg);
    CHECK(super.survived_frac >= 0.2);
}

TEST_CASE("many-to-one identity at t = 1") {
    BranchingConfig cfg;
    cfg.dt = 0.05;
    cfg.seed = 404;
    cfg.cap = 100000;

    const auto rep = many_to_one_check(brownian(), 1.0, 0.5, 0.5, 2.0, 1.0, 1.0,
                                       30000, 100000, cfg);
    const double se = std::sqrt(rep.lhs_se * rep.lhs_se + rep.rhs_se * rep.rhs_se);
    CHECK(std::abs(rep.lhs - rep.rhs) <= 3.0 * se);

    // full half-line window: rhs = e^{rt} P(tau > t)
    const auto rep2 = many_to_one_check(brownian(), 1.0, 0.5, 0.0, 1e9, 1.0, 1.0,
                                        30000, 100000, cfg);
    const double se2 = std::sqrt(rep2.lhs_se * rep2.lhs_se + rep2.rhs_se * rep2.rhs_se);
    CHECK(std::abs(rep2.lhs - rep2.rhs) <= 3.0 * se2);

    // jump model
    const auto de = double_exp_model();
    const auto rep3 = many_to_one_check(de, 1.0, 0.5, 0.5, 2.0, 1.0, 1.0,
                                        30000, 100000, cfg);
    const double se3 = std::sqrt(rep3.lhs_se * rep3.lhs_se + rep3.rhs_se * rep3.rhs_se);
    CHECK(std::abs(rep3.lhs - rep3.rhs) <= 3.0 * se3);
}

TEST_CASE("gw_counts: conventions, monotonicity, first-passage mean oracle") {
    BranchingConfig cfg;
    cfg.dt = 0.05;
    cfg.seed = 1234;
    cfg.cap = 200000;
    cfg.t_max = 200.0;

    // subcritical pair keeps Var(Gـx) finite: 2r < Gamma-critical rate
    const double c = 1.5, r = 0.45;
    std::vector<double> levels{0.0, 0.5, 1.0, 1.5, 2.0};
    const auto gw = gw_counts(brownian(), c, r, levels, 3000, cfg);
    CHECK(gw.undecided == 0);

    for (const auto& run : gw.counts) {
        CHECK(run[0] == 1);  // G_0 = 1
        for (std::size_t j = 1; j < run.size(); ++j)
            CHECK(run[j] >= run[j - 1]);  // every crosser has crossing offspring
    }

    // E G_x = exp(x (c - sqrt(c^2 - 2r))) for Brownian motion via the
    // first-passage MGF of the drifting single particle
    const double rate = c - std::sqrt(c * c - 2.0 * r);
    for (std::size_t j = 1; j < levels.size(); ++j) {
        std::vector<double> g(gw.counts.size());
        for (std::size_t i = 0; i < gw.counts.size(); ++i)
            g[i] = static_cast<double>(gw.counts[i][j]);
        const MeanSE ms = mean_se(g);
        CHECK(std::abs(ms.mean - std::exp(rate * levels[j])) <= 4.0 * ms.se);
    }
}

TEST_CASE("gw_counts grows with the branching rate under coupled seeds") {
    BranchingConfig cfg;
    cfg.dt = 0.05;
    cfg.seed = 888;
    cfg.cap = 200000;
    cfg.t_max = 200.0;
    std::vector<double> levels{1.0};

    auto mean_g = [&](double r) {
        const auto gw = gw_counts(brownian(), 1.5, r, levels, 2000, cfg);
        double acc = 0.0;
        for (const auto& run : gw.counts) acc += run[0];
        return acc / static_cast<double>(gw.counts.size());
    };
    CHECK(mean_g(0.3) < mean_g(0.5));
}

TEST_CASE("gw_counts beyond the boundary mostly hits the cap") {
    BranchingConfig cfg;
    cfg.dt = 0.05;
    cfg.seed = 999;
    cfg.cap = 2000;
    cfg.t_max = 40.0;
    std::vector<double> levels{2.0};
    // r well above Gamma(1) = 0.5
    const auto gw = gw_counts(brownian(), 1.0, 1.2, levels, 100, cfg);
    CHECK(gw.undecided >= 30);
}

} // TEST_SUITE
