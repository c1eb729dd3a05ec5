#ifndef LEVYWAVE_ERRORS_HPP
#define LEVYWAVE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace levywave {

// Theta outside the finite part of the Laplace exponent's domain.
struct DomainError : std::domain_error {
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// A root finder exhausted its iteration budget.
struct ConvergenceError : std::runtime_error {
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

// Requested value lies outside the attainable range of a transform.
struct RangeError : std::range_error {
    explicit RangeError(const std::string& what) : std::range_error(what) {}
};

// psi(theta) - c*theta = -r has no root: r exceeds Gamma(c). This is the
// non-existence signal of the phase boundary, not a numerical failure.
struct NoRoot : std::runtime_error {
    NoRoot(double r, double gamma_c)
        : std::runtime_error("no tilt root: r=" + std::to_string(r) +
                             " exceeds Gamma(c)=" + std::to_string(gamma_c)),
          r(r), gamma_c(gamma_c) {}
    double r;
    double gamma_c;
};

// Every Monte Carlo path was absorbed before the query time.
struct AllAbsorbed : std::runtime_error {
    explicit AllAbsorbed(const std::string& what) : std::runtime_error(what) {}
};

// Explicit time step violates the stability bound of the discretized operator.
struct StabilityError : std::runtime_error {
    explicit StabilityError(const std::string& what) : std::runtime_error(what) {}
};

// The PDE state left [-0.05, 1.05] before clipping.
struct BlowupError : std::runtime_error {
    explicit BlowupError(const std::string& what) : std::runtime_error(what) {}
};

struct InsufficientTrace : std::runtime_error {
    explicit InsufficientTrace(const std::string& what) : std::runtime_error(what) {}
};

// Generating-function inversion target below the attainable range.
struct UndefinedInversion : std::runtime_error {
    explicit UndefinedInversion(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace levywave

#endif
