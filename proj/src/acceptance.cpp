#include "levywave/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "levywave/branching.hpp"
#include "levywave/errors.hpp"
#include "levywave/fkpp.hpp"
#include "levywave/io.hpp"
#include "levywave/model.hpp"
#include "levywave/paths.hpp"
#include "levywave/qsd.hpp"
#include "levywave/stats.hpp"

namespace levywave {

namespace {

LevyTriplet ref_brownian() { return LevyTriplet(0.0, 1.0); }

LevyTriplet ref_jump_model() {
    return center(LevyTriplet(0.0, 1.0, JumpSpec{1.0, DoubleExpJump{0.5, 3.0, 3.0}}));
}

double minimal_qsd_cdf(double c, double x) {
    if (x <= 0.0) return 0.0;
    return 1.0 - (1.0 + c * x) * std::exp(-c * x);
}

double qsd_member_cdf(double c, double r, double x) {
    if (x <= 0.0) return 0.0;
    const double beta = std::sqrt(c * c - 2.0 * r);
    const double ap = c - beta, am = c + beta;
    const double total = 0.5 * (1.0 / ap - 1.0 / am);
    return 0.5 * ((1.0 - std::exp(-ap * x)) / ap - (1.0 - std::exp(-am * x)) / am) /
           total;
}

// Exact conditioned-law CDF of killed drifted Brownian motion (reflection
// principle), used as the estimator anchor in the Yaglom criterion.
std::function<double(double)> conditioned_cdf(double x0, double c, double t) {
    const double y_max = x0 + 10.0 * std::sqrt(t) + c * t;
    const std::size_t n = 20000;
    const double dy = y_max / static_cast<double>(n);
    auto dens = [=](double y) {
        const double a = (y - x0) / std::sqrt(t);
        const double b = (y + x0) / std::sqrt(t);
        return std::exp(-c * y) * (std::exp(-0.5 * a * a) - std::exp(-0.5 * b * b));
    };
    std::vector<double> cum(n + 1, 0.0);
    for (std::size_t i = 1; i <= n; ++i)
        cum[i] = cum[i - 1] + 0.5 * dy * (dens((i - 1) * dy) + dens(i * dy));
    const double total = cum[n];
    return [cum = std::move(cum), dy, total, y_max](double y) {
        if (y <= 0.0) return 0.0;
        if (y >= y_max) return 1.0;
        const double idx = y / dy;
        const std::size_t i = static_cast<std::size_t>(idx);
        return (cum[i] + (idx - i) * (cum[i + 1] - cum[i])) / total;
    };
}

std::string fmt(double v) { return format_double(v); }

struct DetailLog {
    std::ostringstream os;
    bool first = true;
    void add(const std::string& k, double v) {
        os << (first ? "" : "; ") << k << "=" << fmt(v);
        first = false;
    }
    void add(const std::string& text) {
        os << (first ? "" : "; ") << text;
        first = false;
    }
    std::string str() const { return os.str(); }
};

// ---------------------------------------------------------------------------

CriterionResult c1_legendre(const AcceptanceOptions& opt) {
    (void)opt;
    CriterionResult res{"C1", "Legendre transform against closed form and grid search",
                        true, ""};
    DetailLog log;
    const auto bm = ref_brownian();
    double worst_bm = 0.0;
    for (double c : {0.1, 0.5, 1.0, 2.0, 5.0})
        worst_bm = std::max(worst_bm, std::abs(legendre(bm, c) - 0.5 * c * c));
    log.add("brownian_max_err", worst_bm);
    if (worst_bm > 1e-10) res.pass = false;

    const auto de = ref_jump_model();
    const auto [dlo, dhi] = de.theta_star();
    double worst_de = 0.0;
    for (double alpha : {0.3, 0.5, 1.0, 1.7}) {
        double best = -1e300;
        const double a = dlo + 1e-4, b = dhi - 1e-4;
        for (std::size_t i = 0; i <= 100000; ++i) {
            const double th = a + (b - a) * static_cast<double>(i) / 100000.0;
            best = std::max(best, alpha * th - de.psi(th));
        }
        worst_de = std::max(worst_de, std::abs(legendre(de, alpha) - best));
    }
    log.add("jump_vs_grid_max_err", worst_de);
    if (worst_de > 1e-6) res.pass = false;
    res.details = log.str();
    return res;
}

CriterionResult c2_girsanov(const AcceptanceOptions& opt) {
    CriterionResult res{"C2", "Esscher tilt: sampler mean and reweighted expectations",
                        true, ""};
    DetailLog log;
    const std::size_t n = opt.budget == CheckBudget::Full ? 1000000 : 50000;
    const auto de = ref_jump_model();
    const double theta = 0.8, c = 0.5, t = 1.0;
    const auto tilted = esscher_tilt(de, theta, c);
    const double psi_c = de.psi(theta) - c * theta;

    const auto tx = sample_terminal(tilted.process, 0.0, t, n, opt.seed + 2);
    const MeanSE tm = mean_se(tx);
    const double target = de.psi_prime(theta) - c;
    log.add("tilted_mean", tm.mean);
    log.add("target", target);
    log.add("mean_se", tm.se);
    if (std::abs(tm.mean - target) > 3.0 * tm.se) res.pass = false;

    const auto px = sample_terminal(de, c, t, n, opt.seed + 3);
    const std::vector<std::function<double(double)>> fns{
        [](double x) { return std::sin(x); },
        [](double x) { return std::exp(-x * x); },
        [](double x) { return x > -1.0 && x < 2.0 ? 1.0 : 0.0; }};
    int k = 0;
    for (const auto& f : fns) {
        std::vector<double> w(n), p(n);
        for (std::size_t i = 0; i < n; ++i) {
            w[i] = f(tx[i]) * std::exp(-theta * tx[i] + psi_c * t);
            p[i] = f(px[i]);
        }
        const MeanSE mw = mean_se(w), mp = mean_se(p);
        const double se = std::sqrt(mw.se * mw.se + mp.se * mp.se);
        log.add("f" + std::to_string(k) + "_gap", mw.mean - mp.mean);
        log.add("f" + std::to_string(k) + "_3se", 3.0 * se);
        if (std::abs(mw.mean - mp.mean) > 3.0 * se) res.pass = false;
        ++k;
    }
    res.details = log.str();
    return res;
}

CriterionResult c3_many_to_one(const AcceptanceOptions& opt) {
    CriterionResult res{"C3", "Many-to-one window counts at t=1", true, ""};
    DetailLog log;
    const bool full = opt.budget == CheckBudget::Full;
    const std::size_t n_runs = full ? 100000 : 10000;
    const std::size_t n_paths = full ? 300000 : 30000;
    BranchingConfig cfg;
    cfg.dt = 0.05;
    cfg.threads = opt.threads;
    cfg.cap = 1000000;
    int k = 0;
    for (const auto& m : {ref_brownian(), ref_jump_model()}) {
        cfg.seed = opt.seed + 31 + static_cast<std::uint64_t>(k);
        const auto rep =
            many_to_one_check(m, 1.0, 0.5, 0.5, 2.0, 1.0, 1.0, n_runs, n_paths, cfg);
        const double se =
            std::sqrt(rep.lhs_se * rep.lhs_se + rep.rhs_se * rep.rhs_se);
        const std::string tag = k == 0 ? "bm" : "jump";
        log.add(tag + "_lhs", rep.lhs);
        log.add(tag + "_rhs", rep.rhs);
        log.add(tag + "_3se", 3.0 * se);
        if (std::abs(rep.lhs - rep.rhs) > 3.0 * se) res.pass = false;
        ++k;
    }
    res.details = log.str();
    return res;
}

CriterionResult c4_max_speed(const AcceptanceOptions& opt) {
    CriterionResult res{"C4", "Maximum displacement speed R_t/t at t=20", true, ""};
    DetailLog log;
    const bool full = opt.budget == CheckBudget::Full;
    const std::size_t n_runs = full ? 200 : 20;
    BranchingConfig cfg;
    cfg.dt = 0.1;
    cfg.cap = 100000;
    cfg.threads = opt.threads;

    cfg.seed = opt.seed + 41;
    const auto bm_est = max_speed_estimate(ref_brownian(), 1.0, 20.0, n_runs, cfg);
    const double bm_target = std::sqrt(2.0);
    log.add("bm_speed", bm_est.speed);
    log.add("bm_se", bm_est.se);
    log.add("bm_target", bm_target);
    log.add("bm_gap", std::abs(bm_est.speed - bm_target));
    if (std::abs(bm_est.speed - bm_target) > 0.15) res.pass = false;

    const auto de = ref_jump_model();
    cfg.seed = opt.seed + 42;
    const auto de_est = max_speed_estimate(de, 1.0, 20.0, n_runs, cfg);
    const double de_target = gamma_inverse(de, 1.0);
    log.add("jump_speed", de_est.speed);
    log.add("jump_target", de_target);
    log.add("jump_gap", std::abs(de_est.speed - de_target));
    if (std::abs(de_est.speed - de_target) > 0.15) res.pass = false;

    // convergence-trend diagnostic: the gap shrinks as t grows
    cfg.seed = opt.seed + 43;
    const auto at5 = max_speed_estimate(ref_brownian(), 1.0, 5.0, 50, cfg);
    cfg.seed = opt.seed + 44;
    const auto at10 = max_speed_estimate(ref_brownian(), 1.0, 10.0, 50, cfg);
    log.add("trend_gap_t5", std::abs(at5.speed - bm_target));
    log.add("trend_gap_t10", std::abs(at10.speed - bm_target));
    log.add("trend_gap_t20", std::abs(bm_est.speed - bm_target));
    const bool trend = std::abs(at5.speed - bm_target) >
                           std::abs(at10.speed - bm_target) &&
                       std::abs(at10.speed - bm_target) >
                           std::abs(bm_est.speed - bm_target);
    log.add(std::string("gap_monotone_in_t=") + (trend ? "yes" : "no"));
    res.details = log.str();
    return res;
}

struct PhaseGrid {
    std::vector<double> cs{0.4, 0.75, 1.0, 1.3, 1.6};
    std::vector<double> rs{0.125, 0.3, 0.525, 0.8, 1.6};
    double x0 = 4.0;
};

CriterionResult c5_phase_diagram(const AcceptanceOptions& opt) {
    CriterionResult res{"C5", "Phase diagram classification on a 5x5 grid", true, ""};
    DetailLog log;
    const bool full = opt.budget == CheckBudget::Full;
    const std::size_t n_runs = full ? 200 : 40;
    const PhaseGrid grid;
    const auto bm = ref_brownian();

    BranchingConfig cfg;
    cfg.dt = 0.05;
    cfg.t_max = 50.0;
    cfg.threads = opt.threads;

    std::size_t cell = 0;
    for (double c : grid.cs) {
        const double gamma_c = legendre(bm, c);
        for (double r : grid.rs) {
            cfg.cap = (c == 1.0 && r == 0.8) ? (full ? 50000 : 10000)
                                             : (full ? 15000 : 4000);
            cfg.seed = opt.seed + 500 + cell;
            const auto st = extinction_scan(bm, c, r, grid.x0, n_runs, cfg);
            const double margin = r - gamma_c;
            std::string verdict = "band";
            if (std::abs(margin) > 0.05) {
                const bool super_ok = st.survived_frac + st.undecided_frac >= 0.10;
                const bool sub_ok = st.extinct_frac >= 0.90;
                const bool ok = margin > 0.0 ? super_ok : sub_ok;
                verdict = ok ? "ok" : "WRONG";
                if (!ok) res.pass = false;
            }
            if (c == 1.0 && r == 0.3 && st.extinct_frac < 0.99) {
                res.pass = false;
                verdict += "+pinned_extinct_FAIL";
            }
            if (c == 1.0 && r == 0.8 && st.survived_frac < 0.2) {
                res.pass = false;
                verdict += "+pinned_survive_FAIL";
            }
            std::ostringstream cellinfo;
            cellinfo << "(c=" << c << ",r=" << r << "):ext=" << st.extinct_frac
                     << ",cap=" << st.survived_frac << ",und=" << st.undecided_frac
                     << "," << verdict;
            log.add(cellinfo.str());
            ++cell;
        }
    }
    res.details = log.str();
    return res;
}

CriterionResult c6_existence_boundary(const AcceptanceOptions& opt) {
    CriterionResult res{"C6", "QSD existence boundary matches sign(Gamma(c) - r)",
                        true, ""};
    DetailLog log;
    const PhaseGrid grid;
    const auto bm = ref_brownian();
    std::size_t wrong = 0;
    for (double c : grid.cs) {
        const double gamma_c = legendre(bm, c);
        for (double r : grid.rs) {
            bool no_root = false;
            try {
                (void)qsd_theta(bm, c, r);
            } catch (const NoRoot&) {
                no_root = true;
            }
            const bool expect_no_root = r > gamma_c && !is_critical(r, gamma_c);
            if (no_root != expect_no_root) ++wrong;
            if (qsd_regime(bm, c, r) !=
                (expect_no_root ? QsdRegime::NonExistence
                                : (is_critical(r, gamma_c) ? QsdRegime::Critical
                                                           : QsdRegime::Exists)))
                ++wrong;
        }
    }
    log.add("cells_wrong", static_cast<double>(wrong));
    if (wrong > 0) res.pass = false;

    // formula-level propagation on one cell each side of the boundary
    PathConfig pcfg;
    pcfg.dt = 2e-3;
    pcfg.horizon = 30.0;
    pcfg.seed = opt.seed + 6;
    pcfg.threads = opt.threads;
    const auto g = make_qsd_grid(1.0, 200);
    bool threw = false;
    try {
        (void)qsd_density_formula(bm, 1.0, 0.6, g, 0, pcfg);
    } catch (const NoRoot&) {
        threw = true;
    }
    if (!threw) res.pass = false;
    log.add(std::string("noroot_propagates=") + (threw ? "yes" : "no"));
    const auto q = qsd_density_formula(bm, 1.0, 0.4, g, 300, pcfg);
    log.add("exists_theta", q.theta());
    res.details = log.str();
    return res;
}

CriterionResult c7_qsd_correctness(const AcceptanceOptions& opt) {
    CriterionResult res{"C7", "Constructed QSD: shape, survival rate, absorption time",
                        true, ""};
    DetailLog log;
    const bool full = opt.budget == CheckBudget::Full;
    const auto bm = ref_brownian();
    const double c = 1.0, r = 0.5;

    // tilted-renewal construction
    PathConfig lcfg;
    lcfg.dt = full ? 1e-4 : 5e-4;
    lcfg.horizon = full ? 80.0 : 50.0;
    lcfg.seed = opt.seed + 71;
    lcfg.threads = opt.threads;
    std::vector<double> grid(1200);
    for (std::size_t i = 0; i < grid.size(); ++i)
        grid[i] = 12.0 * static_cast<double>(i + 1) / static_cast<double>(grid.size());
    const auto nu = qsd_density_formula(bm, c, r, grid, full ? 8000 : 1500, lcfg);

    const double ks =
        nu.ks_to_cdf([&](double x) { return minimal_qsd_cdf(c, x); });
    log.add("ks_formula_vs_closed_form", ks);
    if (ks > 0.05) res.pass = false;

    // defining property from the constructed density
    PathConfig vcfg;
    vcfg.dt = 0.01;
    vcfg.horizon = 14.0;
    vcfg.seed = opt.seed + 72;
    vcfg.threads = opt.threads;
    const std::size_t n = full ? 1000000 : 100000;
    const auto rep = verify_qsd(bm, c, r, nu, 4.0, n, vcfg);
    log.add("survival", rep.survival);
    log.add("survival_expected", rep.survival_expected);
    log.add("survival_3se", 3.0 * rep.survival_se);
    if (std::abs(rep.survival - rep.survival_expected) > 3.0 * rep.survival_se)
        res.pass = false;
    log.add("mean_tau", rep.mean_tau);
    log.add("mean_tau_target", rep.mean_tau_target);
    if (std::abs(rep.mean_tau - rep.mean_tau_target) > 0.05 * rep.mean_tau_target)
        res.pass = false;
    log.add("ks_conditioned_t4", rep.ks_conditioned);
    res.details = log.str();
    return res;
}

CriterionResult c8_yaglom_minimality(const AcceptanceOptions& opt) {
    CriterionResult res{"C8", "Yaglom limit selects the minimal member", true, ""};
    DetailLog log;
    const bool full = opt.budget == CheckBudget::Full;
    const auto bm = ref_brownian();
    const double c = 1.0;
    const std::vector<double> schedule{3.0, 6.0, 9.0, 12.0, 15.0};
    const std::size_t n = full ? 200000 : 40000;

    PathConfig cfg;
    cfg.dt = 0.02;
    cfg.seed = opt.seed + 81;
    cfg.threads = opt.threads;

    // From x0 = 1 the exact conditioned law at t = 15 still sits ~0.075 from
    // the minimal member (transition-density quadrature), so the estimator is
    // anchored against the exact law there, and the minimality comparison is
    // run from x0 = 5 where the t = 15 transient has decayed below tolerance.
    const auto anchor = yaglom_convergence(bm, c, 1.0, schedule, n, cfg);
    const double ks_anchor =
        anchor.back().result.law.ks_to_cdf(conditioned_cdf(1.0, c, 15.0));
    log.add("estimator_vs_exact_t15_x0_1", ks_anchor);
    if (ks_anchor > 0.02) res.pass = false;
    log.add("exact_t15_x0_1_vs_minimal",
            anchor.back().result.law.ks_to_cdf(
                [&](double x) { return minimal_qsd_cdf(c, x); }));

    cfg.seed = opt.seed + 82;
    const auto stages = yaglom_convergence(bm, c, 5.0, schedule, n, cfg);
    const auto& final_law = stages.back().result.law;
    const double ks_min =
        final_law.ks_to_cdf([&](double x) { return minimal_qsd_cdf(c, x); });
    const double ks_sub =
        final_law.ks_to_cdf([&](double x) { return qsd_member_cdf(c, 0.375, x); });
    log.add("ks_to_minimal", ks_min);
    log.add("ks_to_r0375_member", ks_sub);
    if (ks_min > 0.05) res.pass = false;
    if (ks_sub < 0.05) res.pass = false;
    res.details = log.str();
    return res;
}

CriterionResult c9_front_speed(const AcceptanceOptions& opt) {
    CriterionResult res{"C9", "F-KPP front speed vs the transform inverse", true, ""};
    DetailLog log;
    const bool full = opt.budget == CheckBudget::Full;
    const auto bm = ref_brownian();
    const FrontGrid grid = full ? FrontGrid{-100.0, 300.0, 0.05}
                                : FrontGrid{-50.0, 150.0, 0.1};
    const double T = full ? 40.0 : 20.0;

    auto measure = [&](double r) {
        const auto st = run_front(bm, r, [](double x) { return x >= 0.0 ? 1.0 : 0.0; },
                                  T, 0.0, grid, 0.5);
        return front_speed(st.front_trace).speed;
    };
    const double s1 = measure(1.0);
    log.add("speed_r1", s1);
    log.add("target", std::sqrt(2.0));
    if (std::abs(s1 - std::sqrt(2.0)) > 0.08 * std::sqrt(2.0)) res.pass = false;

    const double s05 = measure(0.5), s2 = measure(2.0);
    log.add("speed_r05", s05);
    log.add("speed_r2", s2);
    if (!(s05 < s1 && s1 < s2)) res.pass = false;
    res.details = log.str();
    return res;
}

CriterionResult c10_wave_construction(const AcceptanceOptions& opt) {
    CriterionResult res{"C10", "Traveling wave from level counts at the critical pair",
                        true, ""};
    DetailLog log;
    const bool full = opt.budget == CheckBudget::Full;
    const auto bm = ref_brownian();
    const double c = std::sqrt(2.0), r = 1.0;

    BranchingConfig cfg;
    cfg.dt = 0.05;
    cfg.cap = 200000;
    cfg.t_max = 200.0;
    cfg.threads = opt.threads;

    std::vector<double> levels;
    for (int i = 1; i <= 20; ++i) levels.push_back(0.2 * i);
    const std::size_t n_runs = full ? 8000 : 1000;

    cfg.seed = opt.seed + 101;
    const auto wave = tw_from_gw(bm, c, r, 0.5, levels, n_runs, cfg);
    log.add("undecided_fraction",
            static_cast<double>(wave.undecided) /
                static_cast<double>(wave.n_runs + wave.undecided));

    bool monotone = true, in_range = true;
    for (std::size_t i = 0; i < wave.w.size(); ++i) {
        if (wave.w[i] <= 0.0 || wave.w[i] > 1.0) in_range = false;
        if (i > 0 && wave.w[i] < wave.w[i - 1] - 1e-12) monotone = false;
    }
    log.add(std::string("monotone=") + (monotone ? "yes" : "no"));
    log.add(std::string("in_unit_interval=") + (in_range ? "yes" : "no"));
    if (!monotone || !in_range) res.pass = false;

    // Residual vs double-sample control. One ratio of mean squares is a
    // noisy statistic in the Monte Carlo regime, so three replicated pairs
    // are summed, with each control extending its main run's streams (common
    // random numbers); the residual stencil uses every second node to damp
    // the 1/dx^2 amplification of sampling noise.
    double res_main = 0.0, res_ctrl = 0.0;
    const std::size_t pairs = full ? 3 : 2;
    for (std::size_t j = 0; j < pairs; ++j) {
        cfg.seed = opt.seed + 101 + j;
        const auto wj = j == 0 ? wave : tw_from_gw(bm, c, r, 0.5, levels, n_runs, cfg);
        const auto wc = tw_from_gw(bm, c, r, 0.5, levels, 2 * n_runs, cfg);
        res_main += wave_equation_residual(bm, wj, c, r, 2);
        res_ctrl += wave_equation_residual(bm, wc, c, r, 2);
    }
    log.add("residual_mean", res_main / static_cast<double>(pairs));
    log.add("residual_control_mean", res_ctrl / static_cast<double>(pairs));
    if (res_main > 3.0 * res_ctrl) res.pass = false;

    cfg.seed = opt.seed + 103;
    const auto mk = mckean_fixed_point_check(bm, c, r, wave, 0.5,
                                             {0.5, 1.0, 1.5, 2.0, 2.5},
                                             full ? 100000 : 20000, cfg);
    log.add("mckean_exit_fraction", mk.exit_fraction);
    for (std::size_t j = 0; j < mk.probes.size(); ++j) {
        const double se_w = wave.se_at(mk.probes[j]);
        const double se = std::sqrt(mk.rhs_se[j] * mk.rhs_se[j] + se_w * se_w);
        log.add("probe" + std::to_string(j) + "_gap",
                std::abs(mk.lhs[j] - mk.rhs[j]));
        log.add("probe" + std::to_string(j) + "_3se", 3.0 * se);
        if (std::abs(mk.lhs[j] - mk.rhs[j]) > 3.0 * se) res.pass = false;
    }
    res.details = log.str();
    return res;
}

// shared by C11: a fixed small battery whose numbers exercise every parallel
// reduction path
nlohmann::ordered_json mini_suite(const AcceptanceOptions& opt, int threads) {
    AcceptanceOptions o = opt;
    o.threads = threads;
    nlohmann::ordered_json j;

    const auto de = ref_jump_model();
    const auto xs = sample_terminal(de, 0.5, 1.0, 30000, o.seed + 111, threads);
    const MeanSE ms = mean_se(xs);
    j["terminal_mean"] = format_double(ms.mean);
    j["terminal_se"] = format_double(ms.se);

    BranchingConfig bcfg;
    bcfg.dt = 0.05;
    bcfg.threads = threads;
    bcfg.seed = o.seed + 112;
    bcfg.cap = 4000;
    bcfg.t_max = 30.0;
    const auto st = extinction_scan(ref_brownian(), 1.0, 0.8, 4.0, 30, bcfg);
    j["phase_extinct"] = format_double(st.extinct_frac);
    j["phase_survived"] = format_double(st.survived_frac);

    PathConfig pcfg;
    pcfg.dt = 0.05;
    pcfg.seed = o.seed + 113;
    pcfg.threads = threads;
    const auto yr = yaglom_mc(ref_brownian(), 1.0, 1.0, 2.0, 30000, pcfg);
    j["yaglom_survival"] = format_double(yr.survival_fraction);
    j["yaglom_mean"] = format_double(yr.law.mean());

    bcfg.seed = o.seed + 114;
    const auto rep = many_to_one_check(ref_brownian(), 1.0, 0.5, 0.5, 2.0, 1.0,
                                       1.0, 5000, 20000, bcfg);
    j["mto_lhs"] = format_double(rep.lhs);
    j["mto_rhs"] = format_double(rep.rhs);
    return j;
}

CriterionResult c11_determinism(const AcceptanceOptions& opt) {
    CriterionResult res{"C11", "Identical summaries across repeats and thread counts",
                        true, ""};
    DetailLog log;
    const std::string run1 = mini_suite(opt, 1).dump();
    const std::string run1b = mini_suite(opt, 1).dump();
    const std::string run8 = mini_suite(opt, 8).dump();
    const bool repeat_equal = run1 == run1b;
    const bool threads_equal = run1 == run8;
    log.add(std::string("repeat_identical=") + (repeat_equal ? "yes" : "no"));
    log.add(std::string("threads_1_vs_8_identical=") + (threads_equal ? "yes" : "no"));
    if (!repeat_equal || !threads_equal) res.pass = false;
    res.details = log.str();
    return res;
}

} // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt,
                                            const std::string& only) {
    std::vector<CriterionResult> out;
    using Step = std::function<CriterionResult(const AcceptanceOptions&)>;
    const std::vector<std::pair<std::string, Step>> steps{
        {"C1", c1_legendre},
        {"C2", c2_girsanov},
        {"C3", c3_many_to_one},
        {"C4", c4_max_speed},
        {"C5", c5_phase_diagram},
        {"C6", c6_existence_boundary},
        {"C7", c7_qsd_correctness},
        {"C8", c8_yaglom_minimality},
        {"C9", c9_front_speed},
        {"C10", c10_wave_construction},
        {"C11", c11_determinism}};
    for (const auto& [id, step] : steps) {
        if (!only.empty() && id != only) continue;
        const auto t0 = std::chrono::steady_clock::now();
        CriterionResult r = step(opt);
        const auto t1 = std::chrono::steady_clock::now();
        const double secs =
            std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count() /
            1000.0;
        r.details += (r.details.empty() ? "" : "; ") + std::string("wall_s=") +
                     format_double(secs);
        out.push_back(std::move(r));
    }
    return out;
}

std::string acceptance_summary_json(const std::vector<CriterionResult>& results,
                                    const AcceptanceOptions& opt) {
    nlohmann::ordered_json j;
    j["budget"] = opt.budget == CheckBudget::Full ? "full" : "quick";
    j["seed"] = opt.seed;
    j["criteria"] = nlohmann::ordered_json::array();
    bool all = true;
    for (const auto& r : results) {
        nlohmann::ordered_json c;
        c["id"] = r.id;
        c["description"] = r.description;
        c["pass"] = r.pass;
        c["details"] = r.details;
        j["criteria"].push_back(c);
        all = all && r.pass;
    }
    j["all_pass"] = all;
    return j.dump(2);
}

} // namespace levywave
