#include "levywave/branching.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "levywave/errors.hpp"
#include "levywave/parallel.hpp"
#include "levywave/paths.hpp"
#include "levywave/stats.hpp"

namespace levywave {

namespace {

struct Particle {
    double x;
    double next_branch;  // absolute time of the next split
};

double fresh_branch_time(double now, double r, Rng& rng) {
    std::exponential_distribution<double> exp_r(r);
    return now + exp_r(rng);
}

// Advances every particle of `cur` from time t0 to t1, handling splits at
// their exact times (children are processed within the same window through
// the work stack). Advance behavior is supplied by `move`, which returns
// false when the particle leaves the system (killed or frozen).
template <typename MoveFn>
void sweep_window(std::vector<Particle>& cur, std::vector<Particle>& next,
                  double t0, double t1, double r, Rng& rng,
                  std::size_t& total_born, MoveFn&& move) {
    next.clear();
    std::vector<std::pair<Particle, double>> stack;  // (particle, current time)
    for (auto& p0 : cur) {
        stack.emplace_back(p0, t0);
        while (!stack.empty()) {
            auto [p, tc] = stack.back();
            stack.pop_back();
            bool alive = true;
            while (p.next_branch < t1) {
                if (!move(p, tc, p.next_branch, rng)) { alive = false; break; }
                tc = p.next_branch;
                ++total_born;
                stack.push_back(
                    {Particle{p.x, fresh_branch_time(tc, r, rng)}, tc});
                p.next_branch = fresh_branch_time(tc, r, rng);
            }
            if (!alive) continue;
            if (move(p, tc, t1, rng)) next.push_back(p);
        }
    }
}

ParticleSystem snapshot_of(double t, const std::vector<Particle>& active,
                           std::size_t born, bool truncated) {
    ParticleSystem s;
    s.time = t;
    s.particles.reserve(active.size());
    for (const auto& p : active) s.particles.push_back(p.x);
    s.total_born = born;
    s.truncated = truncated;
    return s;
}

} // namespace

std::vector<ParticleSystem> run_blp(const LevyTriplet& m, double x0,
                                    const BranchingConfig& cfg,
                                    std::uint64_t stream) {
    if (!(cfg.r > 0.0)) throw std::invalid_argument("run_blp: r must be positive");
    const MotionSampler sampler(m, 0.0);
    Rng rng = make_stream(cfg.seed, stream);

    std::vector<Particle> active{{x0, fresh_branch_time(0.0, cfg.r, rng)}};
    std::vector<Particle> next;
    std::size_t born = 1;
    bool truncated = false;

    std::vector<ParticleSystem> snaps;
    double next_snap = cfg.snapshot_every > 0.0
                           ? cfg.snapshot_every
                           : std::numeric_limits<double>::infinity();

    auto move = [&](Particle& p, double a, double b, Rng& r2) {
        if (b > a) p.x += sampler.increment(b - a, r2);
        return true;
    };

    double t = 0.0;
    while (t < cfg.t_max - 1e-12) {
        const double t1 = std::min(t + cfg.dt, cfg.t_max);
        sweep_window(active, next, t, t1, cfg.r, rng, born, move);
        active.swap(next);
        t = t1;
        if (t >= next_snap - 1e-12) {
            snaps.push_back(snapshot_of(t, active, born, truncated));
            next_snap += cfg.snapshot_every;
        }
        if (active.size() > cfg.cap) { truncated = true; break; }
    }
    if (snaps.empty() || snaps.back().time < t - 1e-12)
        snaps.push_back(snapshot_of(t, active, born, truncated));
    else
        snaps.back().truncated = truncated;
    return snaps;
}

KilledBlpResult run_blp_killed(const LevyTriplet& m, double c, double x0,
                               const BranchingConfig& cfg, std::uint64_t stream) {
    if (!(x0 > 0.0))
        throw std::invalid_argument("run_blp_killed: x0 must be positive");
    if (!(cfg.r > 0.0))
        throw std::invalid_argument("run_blp_killed: r must be positive");
    const MotionSampler sampler(m, c);
    Rng rng = make_stream(cfg.seed, stream);

    std::vector<Particle> active{{x0, fresh_branch_time(0.0, cfg.r, rng)}};
    std::vector<Particle> next;
    std::size_t born = 1;

    auto move = [&](Particle& p, double a, double b, Rng& r2) {
        if (b <= a) return p.x > 0.0;
        const auto out = sampler.advance_killed(p.x, b - a, r2, cfg.bridge_correction);
        p.x = out.x;
        return !out.killed;
    };

    KilledBlpResult res;
    double t = 0.0;
    while (t < cfg.t_max - 1e-12) {
        const double t1 = std::min(t + cfg.dt, cfg.t_max);
        sweep_window(active, next, t, t1, cfg.r, rng, born, move);
        active.swap(next);
        t = t1;
        if (active.empty()) {
            res.outcome = {ExtinctionKind::Extinct, t};
            res.final_state = snapshot_of(t, active, born, false);
            return res;
        }
        if (active.size() >= cfg.cap) {
            res.outcome = {ExtinctionKind::SurvivedCap, t};
            res.final_state = snapshot_of(t, active, born, true);
            return res;
        }
    }
    res.outcome = {ExtinctionKind::Undecided, cfg.t_max};
    res.final_state = snapshot_of(cfg.t_max, active, born, false);
    return res;
}

SpeedEstimate max_speed_estimate(const LevyTriplet& m, double r, double t,
                                 std::size_t n_runs, const BranchingConfig& cfg0) {
    BranchingConfig cfg = cfg0;
    cfg.r = r;
    cfg.t_max = t;
    const MotionSampler sampler(m, 0.0);

    const std::size_t nchunks = chunk_count(n_runs);
    std::vector<std::vector<double>> maxima(nchunks);
    std::vector<std::size_t> truncated(nchunks, 0);

    for_each_chunk(n_runs, cfg.threads, [&](std::size_t ci, std::size_t b,
                                            std::size_t e) {
        for (std::size_t run = b; run < e; ++run) {
            Rng rng = make_stream(cfg.seed, run);
            std::vector<Particle> active{{0.0, fresh_branch_time(0.0, r, rng)}};
            std::vector<Particle> next;
            std::size_t born = 1;
            bool trunc = false;
            auto move = [&](Particle& p, double a, double bb, Rng& r2) {
                if (bb > a) p.x += sampler.increment(bb - a, r2);
                return true;
            };
            double tc = 0.0;
            while (tc < t - 1e-12) {
                const double t1 = std::min(tc + cfg.dt, t);
                sweep_window(active, next, tc, t1, r, rng, born, move);
                active.swap(next);
                tc = t1;
                if (active.size() > cfg.cap) {
                    // keep the rightmost cap particles
                    std::nth_element(active.begin(),
                                     active.begin() + static_cast<long>(cfg.cap),
                                     active.end(),
                                     [](const Particle& u, const Particle& v) {
                                         return u.x > v.x;
                                     });
                    active.resize(cfg.cap);
                    trunc = true;
                }
            }
            double mx = -std::numeric_limits<double>::infinity();
            for (const auto& p : active) mx = std::max(mx, p.x);
            maxima[ci].push_back(mx / t);
            if (trunc) ++truncated[ci];
        }
    });

    std::vector<double> all;
    std::size_t ntrunc = 0;
    for (std::size_t ci = 0; ci < nchunks; ++ci) {
        all.insert(all.end(), maxima[ci].begin(), maxima[ci].end());
        ntrunc += truncated[ci];
    }
    const MeanSE ms = mean_se(all);
    SpeedEstimate est;
    est.speed = ms.mean;
    est.se = ms.se;
    est.truncated_fraction =
        n_runs > 0 ? static_cast<double>(ntrunc) / static_cast<double>(n_runs) : 0.0;
    est.per_run = std::move(all);
    return est;
}

PhaseCellStats extinction_scan(const LevyTriplet& m, double c, double r,
                               double x0, std::size_t n_runs,
                               const BranchingConfig& cfg0) {
    BranchingConfig cfg = cfg0;
    cfg.r = r;
    const std::size_t nchunks = chunk_count(n_runs);
    std::vector<std::array<std::size_t, 3>> tallies(nchunks, {0, 0, 0});

    for_each_chunk(n_runs, cfg.threads, [&](std::size_t ci, std::size_t b,
                                            std::size_t e) {
        for (std::size_t run = b; run < e; ++run) {
            const auto res = run_blp_killed(m, c, x0, cfg, run);
            switch (res.outcome.kind) {
                case ExtinctionKind::Extinct: ++tallies[ci][0]; break;
                case ExtinctionKind::SurvivedCap: ++tallies[ci][1]; break;
                case ExtinctionKind::Undecided: ++tallies[ci][2]; break;
            }
        }
    });

    std::size_t ext = 0, cap = 0, und = 0;
    for (const auto& t : tallies) {
        ext += t[0];
        cap += t[1];
        und += t[2];
    }
    PhaseCellStats st;
    st.n_runs = n_runs;
    const double n = static_cast<double>(n_runs);
    st.extinct_frac = ext / n;
    st.survived_frac = cap / n;
    st.undecided_frac = und / n;
    return st;
}

ManyToOneReport many_to_one_check(const LevyTriplet& m, double c, double r,
                                  double a_lo, double a_hi, double x0, double t,
                                  std::size_t n_runs, std::size_t n_paths,
                                  const BranchingConfig& cfg0) {
    BranchingConfig cfg = cfg0;
    cfg.r = r;
    cfg.t_max = t;

    // Left side: window count of the killed branching process at t.
    const std::size_t nchunks = chunk_count(n_runs);
    std::vector<std::vector<double>> counts(nchunks);
    for_each_chunk(n_runs, cfg.threads, [&](std::size_t ci, std::size_t b,
                                            std::size_t e) {
        for (std::size_t run = b; run < e; ++run) {
            const auto res = run_blp_killed(m, c, x0, cfg, run);
            double cnt = 0.0;
            for (double x : res.final_state.particles)
                if (x >= a_lo && x <= a_hi) cnt += 1.0;
            counts[ci].push_back(cnt);
        }
    });
    std::vector<double> lhs_samples;
    for (const auto& v : counts) lhs_samples.insert(lhs_samples.end(), v.begin(), v.end());
    const MeanSE lhs = mean_se(lhs_samples);

    // Right side: single killed paths, scaled by e^{rt}.
    PathConfig pcfg;
    pcfg.dt = cfg.dt;
    pcfg.horizon = t;
    pcfg.seed = cfg.seed + 0x517cc1b727220a95ULL;
    pcfg.bridge_correction = cfg.bridge_correction;
    pcfg.threads = cfg.threads;
    std::size_t in_window = 0;
    try {
        const YaglomResult yr = yaglom_mc(m, c, x0, t, n_paths, pcfg);
        for (double x : yr.law.samples())
            if (x >= a_lo && x <= a_hi) ++in_window;
    } catch (const AllAbsorbed&) {
    }
    const double n = static_cast<double>(n_paths);
    const double p = static_cast<double>(in_window) / n;

    ManyToOneReport rep;
    rep.lhs = lhs.mean;
    rep.lhs_se = lhs.se;
    const double scale = std::exp(r * t);
    rep.rhs = scale * p;
    rep.rhs_se = scale * std::sqrt(std::max(0.0, p * (1.0 - p) / n));
    return rep;
}

GwCounts gw_counts(const LevyTriplet& m, double c, double r,
                   const std::vector<double>& levels, std::size_t n_runs,
                   const BranchingConfig& cfg0) {
    if (levels.empty()) throw std::invalid_argument("gw_counts: no levels");
    if (!std::is_sorted(levels.begin(), levels.end()))
        throw std::invalid_argument("gw_counts: levels must be ascending");
    if (levels.front() < 0.0)
        throw std::invalid_argument("gw_counts: levels must be nonnegative");

    BranchingConfig cfg = cfg0;
    cfg.r = r;

    // Motion of the reflected generator plus velocity +c.
    const LevyTriplet dual = dual_reflect(m);
    const MotionSampler sampler(dual, -c);

    const std::size_t nlev = levels.size();
    const double top = levels.back();

    struct GwParticle {
        double x;
        double line_max;          // running maximum along the lineage
        std::uint32_t lvl;        // first level not yet crossed by the lineage
        double next_branch;
    };

    const std::size_t nchunks = chunk_count(n_runs);
    std::vector<std::vector<std::vector<std::uint32_t>>> results(nchunks);
    std::vector<std::size_t> undecided(nchunks, 0);

    for_each_chunk(n_runs, cfg.threads, [&](std::size_t ci, std::size_t b,
                                            std::size_t e) {
        for (std::size_t run = b; run < e; ++run) {
            Rng rng = make_stream(cfg.seed, run);
            std::vector<std::uint32_t> cnt(nlev, 0);

            auto cross = [&](GwParticle& p, double seg_max) {
                if (seg_max <= p.line_max) return;
                p.line_max = seg_max;
                while (p.lvl < nlev && levels[p.lvl] <= p.line_max) {
                    ++cnt[p.lvl];
                    ++p.lvl;
                }
            };

            std::vector<GwParticle> active;
            {
                // line_max starts below zero so that a level at 0 is counted
                // once for the ancestor (the G_0 = 1 convention).
                GwParticle p0{0.0, -std::numeric_limits<double>::infinity(), 0,
                              fresh_branch_time(0.0, r, rng)};
                cross(p0, 0.0);
                active.push_back(p0);
            }

            // advance to `when`; returns false when the particle froze
            auto move = [&](GwParticle& p, double a, double bb, Rng& r2) {
                if (bb > a) {
                    const auto out = sampler.advance_tracking_max(p.x, bb - a, r2);
                    p.x = out.x;
                    cross(p, out.seg_max);
                    if (p.line_max >= top) return false;  // frozen
                }
                return true;
            };

            std::vector<GwParticle> next;
            bool ok = true;
            double t = 0.0;
            std::size_t born = 1;
            while (!active.empty()) {
                if (t >= cfg.t_max || born > cfg.cap) { ok = false; break; }
                const double t1 = t + cfg.dt;
                next.clear();
                std::vector<std::pair<GwParticle, double>> stack;
                for (auto& p0 : active) {
                    stack.emplace_back(p0, t);
                    while (!stack.empty()) {
                        auto [p, tc] = stack.back();
                        stack.pop_back();
                        bool alive = true;
                        while (p.next_branch < t1) {
                            if (!move(p, tc, p.next_branch, rng)) { alive = false; break; }
                            tc = p.next_branch;
                            ++born;
                            GwParticle child = p;
                            child.next_branch = fresh_branch_time(tc, r, rng);
                            stack.emplace_back(child, tc);
                            p.next_branch = fresh_branch_time(tc, r, rng);
                        }
                        if (!alive) continue;
                        if (move(p, tc, t1, rng)) next.push_back(p);
                    }
                    if (born > cfg.cap) break;
                }
                active.swap(next);
                t = t1;
            }

            if (ok) results[ci].push_back(std::move(cnt));
            else ++undecided[ci];
        }
    });

    GwCounts out;
    out.levels = levels;
    for (std::size_t ci = 0; ci < nchunks; ++ci) {
        for (auto& c2 : results[ci]) out.counts.push_back(std::move(c2));
        out.undecided += undecided[ci];
    }
    return out;
}

} // namespace levywave
