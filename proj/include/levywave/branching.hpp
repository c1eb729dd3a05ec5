#ifndef LEVYWAVE_BRANCHING_HPP
#define LEVYWAVE_BRANCHING_HPP

#include <cstdint>
#include <vector>

#include "levywave/model.hpp"

namespace levywave {

struct BranchingConfig {
    double r = 1.0;              // binary branching rate
    std::size_t cap = 100000;    // population cap
    double t_max = 10.0;
    double dt = 1e-3;            // synchronization step; branch times are exact
    std::uint64_t seed = 0;
    bool bridge_correction = true;
    int threads = 1;
    double snapshot_every = 0.0; // 0: final state only
};

struct ParticleSystem {
    double time = 0.0;
    std::vector<double> particles;  // active positions
    std::vector<double> frozen;     // frozen positions (freezing runs only)
    std::size_t total_born = 1;
    bool truncated = false;         // population cap was hit
};

enum class ExtinctionKind { Extinct, SurvivedCap, Undecided };

struct ExtinctionOutcome {
    ExtinctionKind kind = ExtinctionKind::Undecided;
    double time = 0.0;
};

// Free branching Lévy process: every particle moves independently, splits in
// two at rate r at its current position. Returns snapshots (the final state
// always included). `stream` selects the run's RNG stream under cfg.seed.
std::vector<ParticleSystem> run_blp(const LevyTriplet& m, double x0,
                                    const BranchingConfig& cfg,
                                    std::uint64_t stream = 0);

struct KilledBlpResult {
    ExtinctionOutcome outcome;
    ParticleSystem final_state;
};

// Branching process drifted by -c and absorbed at the origin. Ends at
// extinction, at the population cap (survival evidence), or at t_max.
KilledBlpResult run_blp_killed(const LevyTriplet& m, double c, double x0,
                               const BranchingConfig& cfg,
                               std::uint64_t stream = 0);

struct SpeedEstimate {
    double speed = 0.0;       // mean over runs of (max position)/t
    double se = 0.0;
    double truncated_fraction = 0.0;  // runs that hit the selection cap
    std::vector<double> per_run;
};

// Maximum-displacement speed of the free branching process. Runs that exceed
// the cap keep only their rightmost `cap` particles (selection at the sync
// step); the induced lag is O(1/log^2 cap) and reported via
// truncated_fraction, never silent.
SpeedEstimate max_speed_estimate(const LevyTriplet& m, double r, double t,
                                 std::size_t n_runs, const BranchingConfig& cfg);

struct PhaseCellStats {
    double extinct_frac = 0.0;
    double survived_frac = 0.0;   // SurvivedCap outcomes
    double undecided_frac = 0.0;
    std::size_t n_runs = 0;
};

PhaseCellStats extinction_scan(const LevyTriplet& m, double c, double r,
                               double x0, std::size_t n_runs,
                               const BranchingConfig& cfg);

struct ManyToOneReport {
    double lhs = 0.0;     // E count of killed-branching particles in A at t
    double lhs_se = 0.0;
    double rhs = 0.0;     // e^{rt} P(X_t - ct in A, min >= 0)
    double rhs_se = 0.0;
};

ManyToOneReport many_to_one_check(const LevyTriplet& m, double c, double r,
                                  double a_lo, double a_hi, double x0, double t,
                                  std::size_t n_runs, std::size_t n_paths,
                                  const BranchingConfig& cfg);

struct GwCounts {
    std::vector<double> levels;
    // counts[run][level]: number of lineages whose first passage over the
    // level happened before any ancestor crossed it; one coupled run serves
    // every level, frozen at the largest one.
    std::vector<std::vector<std::uint32_t>> counts;
    std::size_t undecided = 0;  // runs cut by cap or t_max, excluded
};

// Level-crossing counts of the branching process driven by the reflected
// generator plus velocity +c, started at the origin and frozen at the top
// level. A particle's level bookkeeping uses the exact maximum of each
// diffusive piece, so crossing counts do not depend on dt.
GwCounts gw_counts(const LevyTriplet& m, double c, double r,
                   const std::vector<double>& levels, std::size_t n_runs,
                   const BranchingConfig& cfg);

} // namespace levywave

#endif
