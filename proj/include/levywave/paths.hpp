#ifndef LEVYWAVE_PATHS_HPP
#define LEVYWAVE_PATHS_HPP

#include <cstdint>
#include <vector>

#include "levywave/model.hpp"
#include "levywave/rng.hpp"
#include "levywave/stats.hpp"

namespace levywave {

struct PathConfig {
    double dt = 1e-3;
    double horizon = 10.0;
    std::uint64_t seed = 0;
    bool bridge_correction = true;
    int threads = 1;
};

struct KilledPathResult {
    bool survived = false;
    double tau = 0.0;       // absorption time, or the horizon when survived
    double terminal = 0.0;  // position at min(tau, horizon)
    std::vector<double> times;      // filled only when a trajectory was requested
    std::vector<double> positions;
};

struct SampledPath {
    std::vector<double> times;
    std::vector<double> positions;
};

/**
 * Exact-in-law increment sampler for X_t - ct: Gaussian part plus compound
 * Poisson jumps, with jumps placed at their exact times inside a step. With
 * the diffusive-bridge corrections on, killed evolution is exact in law at
 * any step size; only the reported absorption time is rounded up to the end
 * of its sub-interval.
 */
class MotionSampler {
public:
    MotionSampler(const LevyTriplet& m, double velocity);

    double drift() const { return drift_; }
    double sigma() const { return sigma_; }

    // One exact increment over a span h (no killing).
    double increment(double h, Rng& rng) const;

    struct KillOutcome {
        double x;
        bool killed;
        double t_offset;  // time of death within the step (== h when alive)
    };
    // Advance a positive position over h, absorbing at zero. `bridge` enables
    // the in-step crossing corrections; without it only the step endpoint is
    // checked.
    KillOutcome advance_killed(double x, double h, Rng& rng, bool bridge) const;

    struct MaxOutcome {
        double x;
        double seg_max;  // exact running maximum over the step
    };
    // Advance tracking the exact path maximum (Brownian-bridge maximum on
    // each diffusive piece, jump landings included).
    MaxOutcome advance_tracking_max(double x, double h, Rng& rng) const;

private:
    double drift_;
    double sigma_;
    double rate_;
    JumpDist dist_;
};

// Grid skeleton of X_t - ct started at x0.
SampledPath simulate_path(const LevyTriplet& m, double c, double x0,
                          const PathConfig& cfg);

// Single killed path (stream 0 of cfg.seed). x0 must be positive.
KilledPathResult simulate_killed(const LevyTriplet& m, double c, double x0,
                                 const PathConfig& cfg,
                                 bool record_trajectory = false);

struct YaglomResult {
    EmpiricalDistribution law;   // survivors' positions
    double survival_fraction = 0.0;
    std::size_t n_paths = 0;
    std::size_t n_survivors = 0;
};

// Empirical conditioned law at time t from a point mass at x0.
// Throws AllAbsorbed when no path survives.
YaglomResult yaglom_mc(const LevyTriplet& m, double c, double x0, double t,
                       std::size_t n_paths, const PathConfig& cfg);

// Same, but with one prescribed start per path (used by the staged Yaglom
// estimator, which restarts from an intermediate conditioned law).
// stream_block partitions the seed space between stages.
YaglomResult evolve_conditioned(const LevyTriplet& m, double c,
                                const std::vector<double>& starts, double span,
                                const PathConfig& cfg,
                                std::uint64_t stream_block = 0);

struct FirstPassageSample {
    std::vector<double> tau;        // min(absorption time, horizon)
    std::vector<bool> censored;     // true when the horizon was hit first
    double horizon = 0.0;
    double censored_fraction = 0.0;
};

FirstPassageSample first_passage_mc(const LevyTriplet& m, double c, double x0,
                                    std::size_t n_paths, const PathConfig& cfg);

// As above with per-path starting points (for absorption times under a law).
FirstPassageSample first_passage_from(const LevyTriplet& m, double c,
                                      const std::vector<double>& starts,
                                      const PathConfig& cfg,
                                      std::uint64_t stream_block = 0);

/**
 * Monte Carlo renewal function of the descending-ladder-height process of the
 * dual-tilted model, evaluated on the (ascending, positive) grid xs.
 *
 * The estimator counts running-minimum records of the discrete skeleton by
 * depth. Paths stop once the record depth clears the last grid point, once
 * the walk has drifted far enough above its minimum that a return is
 * negligible, or at cfg.horizon; horizon-censored paths contribute the
 * renewal-theorem tail estimate (x - depth)+ / mean-ladder-increment, which
 * keeps the recurrent (critical-tilt) case unbiased at desk scale.
 */
std::vector<double> ladder_renewal(const TiltedModel& tilted,
                                   const std::vector<double>& xs,
                                   std::size_t n_paths, const PathConfig& cfg);

// Terminal values of X_t - ct from 0 (single exact draw per path).
std::vector<double> sample_terminal(const LevyTriplet& m, double c, double t,
                                    std::size_t n_samples, std::uint64_t seed,
                                    int threads = 1);

} // namespace levywave

#endif
