#ifndef LEVYWAVE_MODEL_HPP
#define LEVYWAVE_MODEL_HPP

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "levywave/rng.hpp"

namespace levywave {

/**
 * Finite-activity jump families. Each one has a closed-form MGF on an open
 * interval around zero, a closed-form Esscher tilt, and an exact sampler,
 * which is what keeps path simulation exact in law.
 */
struct DoubleExpJump {
    double p;          // probability of a positive jump
    double eta_plus;   // rate of the positive exponential branch
    double eta_minus;  // rate of the negative exponential branch
};

struct GaussianJump {
    double mean;
    double stddev;
};

struct DiscreteJump {
    // (location, probability) atoms; probabilities sum to 1.
    std::vector<std::pair<double, double>> atoms;
};

using JumpDist = std::variant<DoubleExpJump, GaussianJump, DiscreteJump>;

struct JumpSpec {
    double rate = 0.0;  // jump intensity; 0 means Brownian-with-drift
    JumpDist dist = GaussianJump{0.0, 1.0};
};

// Jump-distribution kernel, exposed for the path samplers and the nonlocal
// operator quadrature.
double jump_mgf(const JumpDist& d, double theta);
double jump_mgf_prime(const JumpDist& d, double theta);
double jump_mgf_second(const JumpDist& d, double theta);
double jump_mean(const JumpDist& d);
// E[X 1{|X|<1}]: the drift contribution of the small-jump compensator.
double jump_compensator_m1(const JumpDist& d);
// Open interval on which the MGF is finite.
std::pair<double, double> jump_mgf_domain(const JumpDist& d);
double jump_sample(const JumpDist& d, Rng& rng);
// P(jump in (a, b]).
double jump_cell_mass(const JumpDist& d, double a, double b);
JumpDist jump_reflect(const JumpDist& d);
// Law reweighted by e^{theta x} / M(theta).
JumpDist jump_tilt(const JumpDist& d, double theta);

struct TiltedModel;

/**
 * Drift + Brownian volatility + finite-activity jumps. sigma must be
 * positive. `b` is the drift of the compensated form
 *     psi(theta) = b theta + sigma^2 theta^2 / 2
 *                + lambda (M(theta) - 1) - theta lambda m1,
 * with m1 the small-jump compensator; the uncompensated path drift
 * b_eff = b - lambda m1 is cached at construction.
 */
class LevyTriplet {
public:
    LevyTriplet(double b, double sigma, JumpSpec jumps = {});

    double b() const { return b_; }
    double sigma() const { return sigma_; }
    const JumpSpec& jumps() const { return jumps_; }
    // Pathwise (uncompensated) drift of the continuous part.
    double drift_eff() const { return b_eff_; }

    double psi(double theta) const;
    double psi_prime(double theta) const;
    double psi_second(double theta) const;

    // psi'(0) and psi''(0).
    double mean() const;
    double variance_rate() const;

    std::pair<double, double> theta_star() const { return domain_; }
    bool in_domain(double theta) const;

private:
    double b_;
    double sigma_;
    JumpSpec jumps_;
    double b_eff_;
    std::pair<double, double> domain_;
};

// Model with drift adjusted so psi'(0) = 0; everything else unchanged.
LevyTriplet center(const LevyTriplet& m);

// Legendre transform Gamma(alpha) = sup_theta { alpha theta - psi(theta) },
// computed through the stationarity condition psi'(theta) = alpha
// (safeguarded Newton; psi is strictly convex since sigma > 0).
double legendre(const LevyTriplet& m, double alpha);

// Same transform applied to the exponent of the reflected process -X.
double legendre_dual(const LevyTriplet& m, double alpha);

// Unique c >= 0 with Gamma(c) = r. Throws RangeError if r is not attained.
double gamma_inverse(const LevyTriplet& m, double r);

// Location and value of the minimum of psi_c(theta) = psi(theta) - c theta:
// theta_c with psi'(theta_c) = c, and Gamma(c) = c theta_c - psi(theta_c).
struct GammaPoint {
    double theta_c;
    double gamma;
};
GammaPoint gamma_point(const LevyTriplet& m, double c);

// |r - Gamma(c)| <= 1e-9 max(1, r): the explicit critical classification band.
bool is_critical(double r, double gamma_c);

// Smaller root theta <= theta_c of psi(theta) - c theta = -r; returns theta_c
// on the critical band. Throws NoRoot when r > Gamma(c).
double qsd_theta(const LevyTriplet& m, double c, double r);

// Triplet of -X: drift negated, jumps reflected, sigma unchanged.
LevyTriplet dual_reflect(const LevyTriplet& m);

/**
 * The model after the exponential change of measure at tilt theta, expressed
 * in the frame moving at velocity c: its Laplace exponent is
 * psi(theta + u) - psi(theta) - c u, so the unit-time mean is psi'(theta) - c
 * and the jump law is reweighted by e^{theta x}.
 */
struct TiltedModel {
    LevyTriplet base;
    double theta;
    double c;
    LevyTriplet process;
};

TiltedModel esscher_tilt(const LevyTriplet& m, double theta, double c);

// The dual-reflected tilted process: unit-time mean c - psi'(theta), same
// sigma, jump measure e^{-theta x} dpi(-x). For theta <= theta_c its mean is
// nonnegative, which is what the ladder-height construction requires.
TiltedModel qsd_dual_process(const LevyTriplet& m, double theta, double c);

// JSON document {"b":..., "sigma":..., "jump":{...}, "center":bool}.
LevyTriplet model_from_json_text(const std::string& text);
std::string model_to_json_text(const LevyTriplet& m);

} // namespace levywave

#endif
