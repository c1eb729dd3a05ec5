#include "levywave/paths.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "levywave/errors.hpp"
#include "levywave/parallel.hpp"

namespace levywave {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int sample_jump_count(double mean, Rng& rng) {
    std::poisson_distribution<int> pois(mean);
    return pois(rng);
}

} // namespace

MotionSampler::MotionSampler(const LevyTriplet& m, double velocity)
    : drift_(m.drift_eff() - velocity),
      sigma_(m.sigma()),
      rate_(m.jumps().rate),
      dist_(m.jumps().dist) {}

double MotionSampler::increment(double h, Rng& rng) const {
    std::normal_distribution<double> normal(0.0, 1.0);
    double dx = drift_ * h + sigma_ * std::sqrt(h) * normal(rng);
    if (rate_ > 0.0) {
        const int k = sample_jump_count(rate_ * h, rng);
        for (int i = 0; i < k; ++i) dx += jump_sample(dist_, rng);
    }
    return dx;
}

MotionSampler::KillOutcome MotionSampler::advance_killed(double x, double h,
                                                         Rng& rng,
                                                         bool bridge) const {
    if (!bridge) {
        const double xn = x + increment(h, rng);
        return {xn, xn <= 0.0, h};
    }
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    // Exact jump times inside the step (order statistics of uniforms).
    int k = 0;
    double jump_times[8];
    std::vector<double> jump_times_big;
    const double* times = jump_times;
    if (rate_ > 0.0) {
        k = sample_jump_count(rate_ * h, rng);
        if (k <= 8) {
            for (int i = 0; i < k; ++i) jump_times[i] = unif(rng) * h;
            std::sort(jump_times, jump_times + k);
        } else {
            jump_times_big.resize(static_cast<std::size_t>(k));
            for (auto& t : jump_times_big) t = unif(rng) * h;
            std::sort(jump_times_big.begin(), jump_times_big.end());
            times = jump_times_big.data();
        }
    }

    double a = x;
    double prev = 0.0;
    for (int i = 0; i <= k; ++i) {
        const double t_end = i < k ? times[i] : h;
        const double span = t_end - prev;
        if (span > 0.0) {
            const double b = a + drift_ * span + sigma_ * std::sqrt(span) * normal(rng);
            if (b <= 0.0) return {b, true, t_end};
            // Brownian bridge from a to b over `span` hits zero with
            // probability exp(-2ab / (sigma^2 span)).
            if (unif(rng) < std::exp(-2.0 * a * b / (sigma_ * sigma_ * span)))
                return {b, true, t_end};
            a = b;
        }
        if (i < k) {
            a += jump_sample(dist_, rng);
            if (a <= 0.0) return {a, true, t_end};
        }
        prev = t_end;
    }
    return {a, false, h};
}

MotionSampler::MaxOutcome MotionSampler::advance_tracking_max(double x, double h,
                                                              Rng& rng) const {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    int k = 0;
    double jump_times[8];
    std::vector<double> jump_times_big;
    const double* times = jump_times;
    if (rate_ > 0.0) {
        k = sample_jump_count(rate_ * h, rng);
        if (k <= 8) {
            for (int i = 0; i < k; ++i) jump_times[i] = unif(rng) * h;
            std::sort(jump_times, jump_times + k);
        } else {
            jump_times_big.resize(static_cast<std::size_t>(k));
            for (auto& t : jump_times_big) t = unif(rng) * h;
            std::sort(jump_times_big.begin(), jump_times_big.end());
            times = jump_times_big.data();
        }
    }

    double a = x;
    double seg_max = x;
    double prev = 0.0;
    for (int i = 0; i <= k; ++i) {
        const double t_end = i < k ? times[i] : h;
        const double span = t_end - prev;
        if (span > 0.0) {
            const double b = a + drift_ * span + sigma_ * std::sqrt(span) * normal(rng);
            // Exact bridge maximum: (a + b + sqrt((b-a)^2 + 2 sigma^2 span E))/2
            // with E standard exponential.
            const double e = -std::log(unif(rng));
            const double d = b - a;
            const double mx =
                0.5 * (a + b + std::sqrt(d * d + 2.0 * sigma_ * sigma_ * span * e));
            seg_max = std::max(seg_max, mx);
            a = b;
        }
        if (i < k) {
            a += jump_sample(dist_, rng);
            seg_max = std::max(seg_max, a);
        }
        prev = t_end;
    }
    return {a, seg_max};
}

SampledPath simulate_path(const LevyTriplet& m, double c, double x0,
                          const PathConfig& cfg) {
    const MotionSampler sampler(m, c);
    Rng rng = make_stream(cfg.seed, 0);
    const std::size_t steps =
        static_cast<std::size_t>(std::floor(cfg.horizon / cfg.dt + 0.5));
    SampledPath path;
    path.times.reserve(steps + 1);
    path.positions.reserve(steps + 1);
    path.times.push_back(0.0);
    path.positions.push_back(x0);
    double x = x0;
    for (std::size_t i = 1; i <= steps; ++i) {
        x += sampler.increment(cfg.dt, rng);
        path.times.push_back(static_cast<double>(i) * cfg.dt);
        path.positions.push_back(x);
    }
    return path;
}

namespace {

KilledPathResult run_killed(const MotionSampler& sampler, double x0, double t_end,
                            const PathConfig& cfg, Rng& rng,
                            std::vector<double>* times = nullptr,
                            std::vector<double>* positions = nullptr) {
    KilledPathResult res;
    double x = x0;
    double t = 0.0;
    if (times) {
        times->push_back(0.0);
        positions->push_back(x0);
    }
    while (t < t_end - 1e-15) {
        const double h = std::min(cfg.dt, t_end - t);
        const auto out = sampler.advance_killed(x, h, rng, cfg.bridge_correction);
        if (out.killed) {
            res.survived = false;
            res.tau = t + out.t_offset;
            res.terminal = out.x;
            if (times) {
                times->push_back(res.tau);
                positions->push_back(out.x);
            }
            return res;
        }
        x = out.x;
        t += h;
        if (times) {
            times->push_back(t);
            positions->push_back(x);
        }
    }
    res.survived = true;
    res.tau = t_end;
    res.terminal = x;
    return res;
}

} // namespace

KilledPathResult simulate_killed(const LevyTriplet& m, double c, double x0,
                                 const PathConfig& cfg, bool record_trajectory) {
    if (!(x0 > 0.0))
        throw std::invalid_argument("simulate_killed: x0 must be positive");
    const MotionSampler sampler(m, c);
    Rng rng = make_stream(cfg.seed, 0);
    KilledPathResult res;
    if (record_trajectory)
        return run_killed(sampler, x0, cfg.horizon, cfg, rng, &res.times,
                          &res.positions);
    return run_killed(sampler, x0, cfg.horizon, cfg, rng);
}

YaglomResult evolve_conditioned(const LevyTriplet& m, double c,
                                const std::vector<double>& starts, double span,
                                const PathConfig& cfg, std::uint64_t stream_block) {
    const MotionSampler sampler(m, c);
    const std::size_t n = starts.size();
    const std::size_t nchunks = chunk_count(n);
    std::vector<std::vector<double>> survivors(nchunks);

    for_each_chunk(n, cfg.threads, [&](std::size_t ci, std::size_t b, std::size_t e) {
        auto& out = survivors[ci];
        for (std::size_t i = b; i < e; ++i) {
            Rng rng = make_stream(cfg.seed, (stream_block << 32) + i);
            const auto res = run_killed(sampler, starts[i], span, cfg, rng);
            if (res.survived) out.push_back(res.terminal);
        }
    });

    std::vector<double> all;
    for (const auto& chunk : survivors)
        all.insert(all.end(), chunk.begin(), chunk.end());

    YaglomResult result;
    result.n_paths = n;
    result.n_survivors = all.size();
    result.survival_fraction =
        n > 0 ? static_cast<double>(all.size()) / static_cast<double>(n) : 0.0;
    if (all.empty())
        throw AllAbsorbed("no surviving path at the query time");
    result.law = EmpiricalDistribution(std::move(all));
    return result;
}

YaglomResult yaglom_mc(const LevyTriplet& m, double c, double x0, double t,
                       std::size_t n_paths, const PathConfig& cfg) {
    if (!(x0 > 0.0)) throw std::invalid_argument("yaglom_mc: x0 must be positive");
    if (n_paths < 1) throw std::invalid_argument("yaglom_mc: n_paths must be >= 1");
    if (t == 0.0) {
        YaglomResult r;
        r.n_paths = n_paths;
        r.n_survivors = n_paths;
        r.survival_fraction = 1.0;
        r.law = EmpiricalDistribution(std::vector<double>(n_paths, x0));
        return r;
    }
    return evolve_conditioned(m, c, std::vector<double>(n_paths, x0), t, cfg);
}

FirstPassageSample first_passage_from(const LevyTriplet& m, double c,
                                      const std::vector<double>& starts,
                                      const PathConfig& cfg,
                                      std::uint64_t stream_block) {
    const MotionSampler sampler(m, c);
    const std::size_t n = starts.size();
    FirstPassageSample out;
    out.horizon = cfg.horizon;
    out.tau.resize(n);
    std::vector<char> cens(n, 0);

    for_each_chunk(n, cfg.threads, [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            Rng rng = make_stream(cfg.seed, (stream_block << 32) + i);
            const auto res = run_killed(sampler, starts[i], cfg.horizon, cfg, rng);
            out.tau[i] = res.tau;
            cens[i] = res.survived ? 1 : 0;
        }
    });

    out.censored.assign(cens.begin(), cens.end());
    std::size_t nc = 0;
    for (char f : cens) nc += static_cast<std::size_t>(f);
    out.censored_fraction = n > 0 ? static_cast<double>(nc) / static_cast<double>(n) : 0.0;
    return out;
}

FirstPassageSample first_passage_mc(const LevyTriplet& m, double c, double x0,
                                    std::size_t n_paths, const PathConfig& cfg) {
    if (!(x0 > 0.0))
        throw std::invalid_argument("first_passage_mc: x0 must be positive");
    return first_passage_from(m, c, std::vector<double>(n_paths, x0), cfg);
}

std::vector<double> ladder_renewal(const TiltedModel& tilted,
                                   const std::vector<double>& xs,
                                   std::size_t n_paths, const PathConfig& cfg) {
    if (xs.empty()) return {};
    if (!std::is_sorted(xs.begin(), xs.end()))
        throw std::invalid_argument("ladder_renewal: grid must be ascending");
    const LevyTriplet& proc = tilted.process;
    const double mean_rate = proc.mean();
    if (mean_rate < -1e-9)
        throw std::invalid_argument(
            "ladder_renewal: tilted process drifts to -infinity");

    // Gap above the running minimum beyond which a return is negligible for a
    // positively drifting walk (exponential escape bound). Inactive near the
    // critical tilt, where the horizon censor correction takes over.
    const double var_rate = proc.variance_rate();
    const double gap_cutoff =
        mean_rate > 1e-9 ? 5.0 * var_rate / mean_rate : kInf;

    const MotionSampler sampler(proc, 0.0);
    const std::size_t nlev = xs.size();
    const double x_top = xs.back();
    const std::size_t nchunks = chunk_count(n_paths);

    struct ChunkAcc {
        std::vector<double> bucket;       // records binned by first level >= depth
        std::vector<double> censor_depth; // final depth of horizon-censored paths
        double total_depth = 0.0;
        double total_records = 0.0;
    };
    std::vector<ChunkAcc> acc(nchunks);

    for_each_chunk(n_paths, cfg.threads, [&](std::size_t ci, std::size_t b,
                                             std::size_t e) {
        ChunkAcc& a = acc[ci];
        a.bucket.assign(nlev, 0.0);
        for (std::size_t i = b; i < e; ++i) {
            Rng rng = make_stream(cfg.seed, i);
            double x = 0.0, depth = 0.0, t = 0.0;
            double records = 0.0;
            bool censored = true;
            while (t < cfg.horizon) {
                x += sampler.increment(cfg.dt, rng);
                t += cfg.dt;
                if (-x > depth) {
                    depth = -x;
                    records += 1.0;
                    if (depth > x_top) { censored = false; break; }
                    const std::size_t j = static_cast<std::size_t>(
                        std::lower_bound(xs.begin(), xs.end(), depth) - xs.begin());
                    a.bucket[j] += 1.0;
                } else if (x + depth > gap_cutoff) {
                    censored = false;  // escaped upward; no further records
                    break;
                }
            }
            a.total_depth += depth;
            a.total_records += records;
            if (censored) a.censor_depth.push_back(depth);
        }
    });

    std::vector<double> counts(nlev, 0.0);
    double total_depth = 0.0, total_records = 0.0;
    std::vector<double> censor_depths;
    for (const auto& a : acc) {
        for (std::size_t j = 0; j < nlev; ++j) counts[j] += a.bucket[j];
        total_depth += a.total_depth;
        total_records += a.total_records;
        censor_depths.insert(censor_depths.end(), a.censor_depth.begin(),
                             a.censor_depth.end());
    }

    // Prefix sums: h(x_j) counts all records with depth <= x_j.
    for (std::size_t j = 1; j < nlev; ++j) counts[j] += counts[j - 1];

    // Renewal-restart correction for paths cut at the horizon: the walk will
    // return to its minimum (recurrent regime) and lay down fresh records at
    // the mean ladder spacing.
    const double mean_ladder =
        total_records > 0.0 ? total_depth / total_records : 0.0;
    if (mean_ladder > 0.0) {
        for (const double d : censor_depths)
            for (std::size_t j = 0; j < nlev; ++j)
                if (xs[j] > d) counts[j] += (xs[j] - d) / mean_ladder;
    }

    for (auto& v : counts) v /= static_cast<double>(n_paths);
    return counts;
}

std::vector<double> sample_terminal(const LevyTriplet& m, double c, double t,
                                    std::size_t n_samples, std::uint64_t seed,
                                    int threads) {
    const MotionSampler sampler(m, c);
    std::vector<double> out(n_samples);
    for_each_chunk(n_samples, threads, [&](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            Rng rng = make_stream(seed, i);
            out[i] = sampler.increment(t, rng);
        }
    });
    return out;
}

} // namespace levywave
