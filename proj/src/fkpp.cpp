#include "levywave/fkpp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "levywave/errors.hpp"
#include "levywave/parallel.hpp"
#include "levywave/stats.hpp"

namespace levywave {

AdjointStencil::AdjointStencil(const LevyTriplet& m, double dx) : dx_(dx) {
    if (!(dx > 0.0)) throw std::invalid_argument("AdjointStencil: dx <= 0");
    diff_ = 0.5 * m.sigma() * m.sigma();
    adv_ = -m.drift_eff();
    rate_ = m.jumps().rate;
    if (rate_ <= 0.0) return;

    // Quadrature of the reflected jump law. L* shifts by -y under pi, i.e. by
    // +y under the reflected law.
    const JumpDist refl = jump_reflect(m.jumps().dist);
    if (const auto* da = std::get_if<DiscreteJump>(&refl)) {
        // split each atom between its two neighboring grid shifts
        std::vector<std::pair<int, double>> acc;
        for (const auto& [y, p] : da->atoms) {
            const double k = y / dx;
            const int k0 = static_cast<int>(std::floor(k));
            const double frac = k - k0;
            acc.emplace_back(k0, p * (1.0 - frac));
            if (frac > 0.0) acc.emplace_back(k0 + 1, p * frac);
        }
        std::sort(acc.begin(), acc.end());
        for (const auto& [off, w] : acc) {
            if (!offsets_.empty() && offsets_.back() == off)
                jump_w_.back() += w;
            else {
                offsets_.push_back(off);
                jump_w_.push_back(w);
            }
        }
    } else {
        // cell masses until both tails are below 1e-14
        int reach = 4;
        auto tail = [&](int m2) {
            const double a = (static_cast<double>(m2) + 0.5) * dx;
            return 1.0 - jump_cell_mass(refl, -a, a);
        };
        while (tail(reach) > 1e-14 && reach < 100000) reach *= 2;
        for (int off = -reach; off <= reach; ++off) {
            const double a = (static_cast<double>(off) - 0.5) * dx;
            const double b = (static_cast<double>(off) + 0.5) * dx;
            const double w = jump_cell_mass(refl, a, b);
            if (w > 0.0) {
                offsets_.push_back(off);
                jump_w_.push_back(w);
            }
        }
    }
    // normalize exactly; rows then sum to zero to machine precision
    double total = 0.0;
    for (double w : jump_w_) total += w;
    for (double& w : jump_w_) w /= total;
    for (int off : offsets_) {
        left_reach_ = std::min(left_reach_, off);
        right_reach_ = std::max(right_reach_, off);
    }
    left_reach_ = -left_reach_;
}

double AdjointStencil::max_rate() const {
    return 2.0 * diff_ / (dx_ * dx_) + std::abs(adv_) / dx_ + rate_;
}

void AdjointStencil::apply(const std::vector<double>& u, double left_ghost,
                           double right_ghost, std::vector<double>& out) const {
    const std::int64_t n = static_cast<std::int64_t>(u.size());
    out.assign(u.size(), 0.0);
    auto at = [&](std::int64_t i) {
        if (i < 0) return left_ghost;
        if (i >= n) return right_ghost;
        return u[static_cast<std::size_t>(i)];
    };
    const double inv_dx2 = 1.0 / (dx_ * dx_);
    const double inv_dx = 1.0 / dx_;
    for (std::int64_t i = 0; i < n; ++i) {
        const double ui = u[static_cast<std::size_t>(i)];
        double v = diff_ * (at(i - 1) - 2.0 * ui + at(i + 1)) * inv_dx2;
        if (adv_ >= 0.0)
            v += adv_ * (at(i + 1) - ui) * inv_dx;
        else
            v += adv_ * (ui - at(i - 1)) * inv_dx;
        if (rate_ > 0.0) {
            double shi = 0.0;
            for (std::size_t k = 0; k < offsets_.size(); ++k)
                shi += jump_w_[k] * at(i + offsets_[k]);
            v += rate_ * (shi - ui);
        }
        out[static_cast<std::size_t>(i)] = v;
    }
}

AdjointStencil discretize_adjoint(const LevyTriplet& m, double dx) {
    return AdjointStencil(m, dx);
}

FrontState run_front(const LevyTriplet& m, double r,
                     const std::function<double(double)>& u0, double T,
                     double dt, const FrontGrid& grid, double trace_every) {
    if (!(grid.hi > grid.lo) || !(grid.dx > 0.0))
        throw std::invalid_argument("run_front: bad grid");
    const AdjointStencil stencil(m, grid.dx);
    const double total_rate = stencil.max_rate() + r;
    if (dt <= 0.0) dt = 0.9 / total_rate;
    if (dt * total_rate > 1.0)
        throw StabilityError("run_front: dt exceeds the stability bound 1/(" +
                             std::to_string(total_rate) + ")");

    const std::size_t n =
        static_cast<std::size_t>(std::floor((grid.hi - grid.lo) / grid.dx + 0.5)) + 1;
    FrontState st;
    st.grid.resize(n);
    st.u.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        st.grid[i] = grid.lo + static_cast<double>(i) * grid.dx;
        st.u[i] = std::clamp(u0(st.grid[i]), 0.0, 1.0);
    }
    // Dirichlet data held at the initial profile's boundary values; step
    // initial conditions get 0 on the left and 1 on the right.
    const double left_ghost = std::clamp(u0(grid.lo - grid.dx), 0.0, 1.0);
    const double right_ghost = std::clamp(u0(grid.hi + grid.dx), 0.0, 1.0);

    auto record_front = [&](double t) {
        // leftmost upward crossing of 1/2
        for (std::size_t i = 1; i < n; ++i) {
            if (st.u[i - 1] < 0.5 && st.u[i] >= 0.5) {
                const double w = (0.5 - st.u[i - 1]) / (st.u[i] - st.u[i - 1]);
                st.front_trace.emplace_back(t, st.grid[i - 1] + w * grid.dx);
                return;
            }
        }
    };

    record_front(0.0);
    std::vector<double> lstar;
    const std::size_t steps = static_cast<std::size_t>(std::ceil(T / dt));
    double next_trace = trace_every;
    double t = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
        const double h = std::min(dt, T - t);
        stencil.apply(st.u, left_ghost, right_ghost, lstar);
        for (std::size_t i = 0; i < n; ++i) {
            double v = st.u[i] + h * (lstar[i] + r * st.u[i] * (st.u[i] - 1.0));
            if (v < -0.05 || v > 1.05)
                throw BlowupError("run_front: state left [-0.05, 1.05] at x=" +
                                  std::to_string(st.grid[i]));
            if (v < 0.0) { st.clip_magnitude += -v; v = 0.0; }
            if (v > 1.0) { st.clip_magnitude += v - 1.0; v = 1.0; }
            st.u[i] = v;
        }
        t += h;
        if (t >= next_trace - 1e-12 || k + 1 == steps) {
            record_front(t);
            next_trace += trace_every;
        }
    }
    st.time = t;
    return st;
}

FrontSpeed front_speed(const std::vector<std::pair<double, double>>& trace) {
    std::vector<double> ts, xs;
    if (!trace.empty()) {
        const double t_last = trace.back().first;
        const double t_cut = 0.5 * (trace.front().first + t_last);
        for (const auto& [t, x] : trace)
            if (t >= t_cut) {
                ts.push_back(t);
                xs.push_back(x);
            }
    }
    if (ts.size() < 10)
        throw InsufficientTrace("front_speed: fewer than 10 trace points in window");
    const LinearFit fit = fit_line(ts, xs);
    FrontSpeed out;
    out.speed = fit.slope;
    out.intercept = fit.intercept;
    out.se = fit.slope_se;
    out.r2 = fit.r2;
    out.n_points = fit.n;
    return out;
}

double WaveProfile::value_at(double x) const {
    if (grid.empty()) return 1.0;
    if (x <= grid.front()) return w.front();
    if (x >= grid.back()) return 1.0;
    const auto it = std::lower_bound(grid.begin(), grid.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - grid.begin());
    if (grid[i] == x) return w[i];
    const double fr = (x - grid[i - 1]) / (grid[i] - grid[i - 1]);
    return w[i - 1] + fr * (w[i] - w[i - 1]);
}

double WaveProfile::se_at(double x) const {
    if (w_se.empty() || grid.empty()) return 0.0;
    if (x <= grid.front()) return w_se.front();
    if (x >= grid.back()) return w_se.back();
    const auto it = std::lower_bound(grid.begin(), grid.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - grid.begin());
    if (i == 0) return w_se[0];
    return std::max(w_se[i - 1], w_se[i]);
}

namespace {

double empirical_gf(const std::vector<std::vector<std::uint32_t>>& counts,
                    std::size_t level, double u) {
    if (u <= 0.0) return 0.0;
    const double lu = std::log(u);
    double acc = 0.0;
    for (const auto& run : counts) acc += std::exp(lu * run[level]);
    return acc / static_cast<double>(counts.size());
}

// standard error of the empirical generating function at u
double empirical_gf_se(const std::vector<std::vector<std::uint32_t>>& counts,
                       std::size_t level, double u) {
    const double lu = std::log(u);
    double s1 = 0.0, s2 = 0.0;
    for (const auto& run : counts) {
        const double v = std::exp(lu * run[level]);
        s1 += v;
        s2 += v * v;
    }
    const double n = static_cast<double>(counts.size());
    const double var = std::max(0.0, (s2 - s1 * s1 / n) / (n - 1.0));
    return std::sqrt(var / n);
}

// derivative d/du E[u^G] = E[G u^{G-1}]
double empirical_gf_prime(const std::vector<std::vector<std::uint32_t>>& counts,
                          std::size_t level, double u) {
    const double lu = std::log(u);
    double acc = 0.0;
    for (const auto& run : counts)
        acc += static_cast<double>(run[level]) * std::exp(lu * (run[level] - 1.0));
    return acc / static_cast<double>(counts.size());
}

} // namespace

WaveProfile tw_from_gw(const LevyTriplet& m, double c, double r, double s,
                       const std::vector<double>& levels, std::size_t n_runs,
                       const BranchingConfig& cfg) {
    if (!(s > 0.0 && s < 1.0))
        throw std::invalid_argument("tw_from_gw: s must lie in (0,1)");
    if (levels.empty() || levels.front() <= 0.0)
        throw std::invalid_argument("tw_from_gw: levels must be positive");

    // prepend the origin so that w(0) = s comes out of the same inversion
    std::vector<double> full_levels;
    full_levels.push_back(0.0);
    full_levels.insert(full_levels.end(), levels.begin(), levels.end());

    const GwCounts gw = gw_counts(m, c, r, full_levels, n_runs, cfg);
    if (gw.counts.empty())
        throw AllAbsorbed("tw_from_gw: every run was undecided");

    const std::size_t nlev = full_levels.size();
    WaveProfile wp;
    wp.s = s;
    wp.c = c;
    wp.r = r;
    wp.n_runs = gw.counts.size();
    wp.undecided = gw.undecided;

    // grid: -x_k ... -x_1, 0, x_1 ... x_k
    wp.grid.resize(2 * nlev - 1);
    wp.w.resize(2 * nlev - 1);
    wp.w_se.resize(2 * nlev - 1);
    for (std::size_t j = 0; j < nlev; ++j) {
        wp.grid[nlev - 1 + j] = full_levels[j];
        wp.grid[nlev - 1 - j] = -full_levels[j];
    }

    for (std::size_t j = 0; j < nlev; ++j) {
        // right side: g_x(w) = s by bisection; g is strictly increasing in w
        double lo = 1e-12, hi = 1.0;
        if (empirical_gf(gw.counts, j, lo) > s)
            throw UndefinedInversion("tw_from_gw: s below attainable range at level " +
                                     std::to_string(full_levels[j]));
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (empirical_gf(gw.counts, j, mid) < s) lo = mid; else hi = mid;
            if (hi - lo < 1e-8) break;
        }
        const double w_right = 0.5 * (lo + hi);
        wp.w[nlev - 1 + j] = w_right;
        // delta method through the inversion
        const double gprime = empirical_gf_prime(gw.counts, j, w_right);
        wp.w_se[nlev - 1 + j] =
            gprime > 0.0 ? empirical_gf_se(gw.counts, j, w_right) / gprime : 0.0;
        // left side by the composition rule of the construction
        wp.w[nlev - 1 - j] = empirical_gf(gw.counts, j, s);
        wp.w_se[nlev - 1 - j] = empirical_gf_se(gw.counts, j, s);
    }
    return wp;
}

McKeanReport mckean_fixed_point_check(const LevyTriplet& m, double c, double r,
                                      const WaveProfile& wave, double t,
                                      const std::vector<double>& probes,
                                      std::size_t n_runs,
                                      const BranchingConfig& cfg0) {
    BranchingConfig cfg = cfg0;
    cfg.r = r;
    cfg.t_max = t;
    const LevyTriplet dual = dual_reflect(m);

    const std::size_t np = probes.size();
    const std::size_t nchunks = chunk_count(n_runs);
    std::vector<std::vector<std::vector<double>>> prods(nchunks);
    std::vector<std::size_t> exits(nchunks, 0), evals(nchunks, 0);

    for_each_chunk(n_runs, cfg.threads, [&](std::size_t ci, std::size_t b,
                                            std::size_t e) {
        prods[ci].assign(np, {});
        for (std::size_t run = b; run < e; ++run) {
            const auto snaps = run_blp(dual, 0.0, cfg, run);
            const auto& parts = snaps.back().particles;
            for (std::size_t j = 0; j < np; ++j) {
                double prod = 1.0;
                for (double z : parts) {
                    const double arg = probes[j] + z + c * t;
                    ++evals[ci];
                    if (arg <= wave.grid.front() || arg >= wave.grid.back())
                        ++exits[ci];
                    prod *= wave.value_at(arg);
                }
                prods[ci][j].push_back(prod);
            }
        }
    });

    McKeanReport rep;
    rep.probes = probes;
    rep.lhs.resize(np);
    rep.rhs.resize(np);
    rep.rhs_se.resize(np);
    std::size_t tot_exit = 0, tot_eval = 0;
    for (std::size_t ci = 0; ci < nchunks; ++ci) {
        tot_exit += exits[ci];
        tot_eval += evals[ci];
    }
    rep.exit_fraction =
        tot_eval > 0 ? static_cast<double>(tot_exit) / static_cast<double>(tot_eval) : 0.0;

    for (std::size_t j = 0; j < np; ++j) {
        std::vector<double> all;
        for (std::size_t ci = 0; ci < nchunks; ++ci)
            all.insert(all.end(), prods[ci][j].begin(), prods[ci][j].end());
        const MeanSE ms = mean_se(all);
        rep.lhs[j] = wave.value_at(probes[j]);
        rep.rhs[j] = ms.mean;
        rep.rhs_se[j] = ms.se;
        rep.max_abs_discrepancy =
            std::max(rep.max_abs_discrepancy, std::abs(rep.lhs[j] - rep.rhs[j]));
    }
    return rep;
}

double wave_equation_residual(const LevyTriplet& m, const WaveProfile& wave,
                              double c, double r, std::size_t stride) {
    if (stride == 0) stride = 1;
    std::vector<double> grid, w;
    for (std::size_t i = 0; i < wave.grid.size(); i += stride) {
        grid.push_back(wave.grid[i]);
        w.push_back(wave.w[i]);
    }
    const std::size_t n = grid.size();
    if (n < 5) throw std::invalid_argument("wave_equation_residual: grid too small");
    const double dx = grid[1] - grid[0];
    for (std::size_t i = 1; i < n; ++i)
        if (std::abs((grid[i] - grid[i - 1]) - dx) > 1e-9 * dx)
            throw std::invalid_argument("wave_equation_residual: grid not uniform");

    const AdjointStencil stencil(m, dx);
    std::vector<double> lstar;
    stencil.apply(w, w.front(), 1.0, lstar);

    const std::size_t lo = static_cast<std::size_t>(std::max(1, stencil.left_reach()));
    const std::size_t hi_margin =
        static_cast<std::size_t>(std::max(1, stencil.right_reach()));
    if (lo + hi_margin + 1 >= n)
        throw std::invalid_argument("wave_equation_residual: stencil reach exceeds grid");

    double acc = 0.0;
    std::size_t cnt = 0;
    for (std::size_t i = lo; i + hi_margin < n; ++i) {
        const double wprime = (w[i + 1] - w[i - 1]) / (2.0 * dx);
        const double res = lstar[i] + c * wprime + r * w[i] * (w[i] - 1.0);
        acc += res * res;
        ++cnt;
    }
    return acc / static_cast<double>(cnt);
}

} // namespace levywave
