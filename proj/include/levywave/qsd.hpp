#ifndef LEVYWAVE_QSD_HPP
#define LEVYWAVE_QSD_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "levywave/model.hpp"
#include "levywave/paths.hpp"

namespace levywave {

/**
 * Gridded density on (0, x_max] with an implicit node at the origin where it
 * vanishes. Normalized so the trapezoid integral from 0 equals one.
 */
class QSDensity {
public:
    QSDensity() = default;
    QSDensity(std::vector<double> grid, std::vector<double> values, double theta,
              double c, double r, std::uint64_t seed);

    const std::vector<double>& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    double theta() const { return theta_; }
    double c() const { return c_; }
    double r() const { return r_; }
    std::uint64_t seed() const { return seed_; }
    // Raw integral before normalization.
    double normalization() const { return normalization_; }
    double mean_absorption_target() const { return r_ > 0.0 ? 1.0 / r_ : 0.0; }

    double pdf(double x) const;   // linear interpolation
    double cdf(double x) const;
    double quantile(double u) const;  // inverse CDF, linear in the cumulative
    double mean() const;

    // sup over the grid of |cdf - other_cdf|.
    double ks_to_cdf(const std::function<double(double)>& other_cdf) const;

private:
    std::vector<double> grid_;
    std::vector<double> values_;
    std::vector<double> cum_;
    double theta_ = 0.0;
    double c_ = 0.0;
    double r_ = 0.0;
    double normalization_ = 1.0;
    std::uint64_t seed_ = 0;
};

// Default density grid: 2000 points on (0, 20/theta].
std::vector<double> make_qsd_grid(double theta, std::size_t points = 2000);

enum class QsdRegime { Exists, Critical, NonExistence };

// Analytic existence classification of the (c, r) pair: r vs Gamma(c) with
// the explicit critical band. This is the gate qsd_density_formula applies
// before any sampling.
QsdRegime qsd_regime(const LevyTriplet& m, double c, double r);

/**
 * Quasi-stationary density built from the tilted-renewal representation: tilt
 * theta solving psi(theta) - c theta = -r, ladder-height renewal function h of
 * the dual-tilted process, v proportional to e^{-theta x} h(x). Throws NoRoot
 * when r > Gamma(c).
 */
QSDensity qsd_density_formula(const LevyTriplet& m, double c, double r,
                              const std::vector<double>& grid,
                              std::size_t n_paths, const PathConfig& cfg);

// Normalized solution of (sigma^2/2) v'' + c v' + r v = 0 with v(0) = 0,
// integrable branch. Test oracle for the Brownian specialization.
// Requires 0 < r <= c^2 / (2 sigma^2).
QSDensity qsd_closed_form_brownian(double sigma, double c, double r,
                                   const std::vector<double>& grid);

struct QsdVerifyReport {
    double t = 0.0;
    double survival = 0.0;
    double survival_se = 0.0;
    double survival_expected = 0.0;  // e^{-rt}
    double ks_conditioned = 0.0;     // empirical law at t vs nu
    double mean_tau = 0.0;           // censor-corrected
    double mean_tau_target = 0.0;    // 1/r
    double censored_fraction = 0.0;
    double decay_rate_fit = 0.0;     // exponential rate fitted to the tau tail
    std::size_t n_paths = 0;
};

// Checks the defining property of a QSD: survival e^{-rt}, conditioned law at
// t equal to nu, and mean absorption time 1/r. Horizon for the absorption leg
// comes from cfg.horizon; paths exceeding it contribute horizon + 1/rate_fit.
QsdVerifyReport verify_qsd(const LevyTriplet& m, double c, double r,
                           const QSDensity& nu, double t, std::size_t n_paths,
                           const PathConfig& cfg);

struct YaglomStage {
    double t = 0.0;
    YaglomResult result;
    double ks_to_final = 0.0;
};

/**
 * Conditioned laws along an increasing schedule. Each stage restarts from the
 * previous stage's conditioned law (resampled starting points), which keeps
 * the surviving sample size stable while targeting the same conditional
 * distribution; the spacing of the schedule controls per-stage attrition.
 */
std::vector<YaglomStage> yaglom_convergence(const LevyTriplet& m, double c,
                                            double x0,
                                            const std::vector<double>& schedule,
                                            std::size_t n_paths,
                                            const PathConfig& cfg);

} // namespace levywave

#endif
