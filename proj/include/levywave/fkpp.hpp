#ifndef LEVYWAVE_FKPP_HPP
#define LEVYWAVE_FKPP_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "levywave/branching.hpp"
#include "levywave/model.hpp"

namespace levywave {

/**
 * Uniform-grid discretization of the adjoint generator: second difference for
 * the Brownian part, upwinded first difference for the drift, and a
 * mass-preserving quadrature of the reflected jump law (cell masses for the
 * continuous families, linear-interpolation splitting for off-grid atoms).
 * Rows sum to zero by construction, so constants are annihilated exactly.
 */
class AdjointStencil {
public:
    AdjointStencil(const LevyTriplet& m, double dx);

    double dx() const { return dx_; }
    // Max decay rate of the explicit update; the stability bound is
    // dt * (max_rate + r) <= 1.
    double max_rate() const;

    // L* u on the whole grid; ghost values extend u beyond the ends.
    void apply(const std::vector<double>& u, double left_ghost, double right_ghost,
               std::vector<double>& out) const;

    // Number of grid cells the jump quadrature reaches on each side.
    int left_reach() const { return left_reach_; }
    int right_reach() const { return right_reach_; }

private:
    double dx_;
    double diff_;     // sigma^2 / 2
    double adv_;      // advection velocity of -b_eff d/dx
    double rate_;     // jump intensity
    std::vector<double> jump_w_;  // weights aligned with offsets_
    std::vector<int> offsets_;
    int left_reach_ = 0;
    int right_reach_ = 0;
};

AdjointStencil discretize_adjoint(const LevyTriplet& m, double dx);

struct FrontGrid {
    double lo;
    double hi;
    double dx;
};

struct FrontState {
    std::vector<double> grid;
    std::vector<double> u;
    double time = 0.0;
    // (t, x) where u crosses 1/2, linearly interpolated
    std::vector<std::pair<double, double>> front_trace;
    double clip_magnitude = 0.0;  // total mass clipped back into [0, 1]
};

/**
 * Explicit Euler integration of u_t = L* u + r (u^2 - u) with Dirichlet data
 * 0 on the left and 1 on the right. dt = 0 selects the largest stable step;
 * an explicit dt violating the stability bound throws StabilityError.
 */
FrontState run_front(const LevyTriplet& m, double r,
                     const std::function<double(double)>& u0, double T,
                     double dt, const FrontGrid& grid,
                     double trace_every = 0.25);

struct FrontSpeed {
    double speed = 0.0;
    double intercept = 0.0;
    double se = 0.0;
    double r2 = 0.0;
    std::size_t n_points = 0;
};

// Least-squares slope of the front trace over its last half.
FrontSpeed front_speed(const std::vector<std::pair<double, double>>& trace);

struct WaveProfile {
    std::vector<double> grid;  // symmetric around 0
    std::vector<double> w;     // values in (0, 1], nondecreasing
    std::vector<double> w_se;  // per-node delta-method standard errors
    double s = 0.5;            // generating-function level used
    double c = 0.0;
    double r = 0.0;
    std::size_t n_runs = 0;
    std::size_t undecided = 0;

    double value_at(double x) const;  // interpolation; 1 beyond the right end,
                                      // w.front() beyond the left
    double se_at(double x) const;     // nearest-node standard error
};

/**
 * Traveling-wave profile from the level-crossing counts: on x >= 0 invert the
 * empirical generating function g_x(w) = s, and mirror the construction for
 * x < 0 through w(-x) = g_x(s). The positive levels come from `levels`
 * (ascending, uniform); level 0 carries the convention G_0 = 1, so w(0) = s.
 */
WaveProfile tw_from_gw(const LevyTriplet& m, double c, double r, double s,
                       const std::vector<double>& levels, std::size_t n_runs,
                       const BranchingConfig& cfg);

struct McKeanReport {
    std::vector<double> probes;
    std::vector<double> lhs;      // w(x)
    std::vector<double> rhs;      // E prod w(x + particle + ct)
    std::vector<double> rhs_se;
    double max_abs_discrepancy = 0.0;
    double exit_fraction = 0.0;   // particle evaluations outside the grid
};

// Fixed-point identity of the wave under the free branching evolution in the
// wave frame.
McKeanReport mckean_fixed_point_check(const LevyTriplet& m, double c, double r,
                                      const WaveProfile& wave, double t,
                                      const std::vector<double>& probes,
                                      std::size_t n_runs,
                                      const BranchingConfig& cfg);

// Mean-square residual of L* w + c w' + r w (w - 1) over interior nodes where
// the jump stencil fits entirely inside the grid. `stride` coarsens the
// residual discretization to every stride-th node, which damps the 1/dx^2
// amplification of Monte Carlo noise when w was estimated from samples.
double wave_equation_residual(const LevyTriplet& m, const WaveProfile& wave,
                              double c, double r, std::size_t stride = 1);

} // namespace levywave

#endif
