#include "levywave/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "levywave/errors.hpp"

namespace levywave {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double norm_pdf(double z) {
    static const double inv_sqrt_2pi = 0.3989422804014327;
    return inv_sqrt_2pi * std::exp(-0.5 * z * z);
}

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

void validate_jump_dist(const JumpDist& d) {
    if (const auto* de = std::get_if<DoubleExpJump>(&d)) {
        if (de->p < 0.0 || de->p > 1.0)
            throw std::invalid_argument("double_exp: p outside [0,1]");
        if (de->eta_plus <= 0.0 || de->eta_minus <= 0.0)
            throw std::invalid_argument("double_exp: rates must be positive");
    } else if (const auto* g = std::get_if<GaussianJump>(&d)) {
        if (g->stddev <= 0.0)
            throw std::invalid_argument("gaussian jump: stddev must be positive");
    } else {
        const auto& atoms = std::get<DiscreteJump>(d).atoms;
        if (atoms.empty()) throw std::invalid_argument("discrete jump: no atoms");
        double total = 0.0;
        for (const auto& [x, p] : atoms) {
            (void)x;
            if (p < 0.0) throw std::invalid_argument("discrete jump: negative mass");
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-12)
            throw std::invalid_argument("discrete jump: masses must sum to 1");
    }
}

} // namespace

double jump_mgf(const JumpDist& d, double theta) {
    if (const auto* de = std::get_if<DoubleExpJump>(&d)) {
        double m = 0.0;
        if (de->p > 0.0) m += de->p * de->eta_plus / (de->eta_plus - theta);
        if (de->p < 1.0) m += (1.0 - de->p) * de->eta_minus / (de->eta_minus + theta);
        return m;
    }
    if (const auto* g = std::get_if<GaussianJump>(&d))
        return std::exp(theta * g->mean + 0.5 * theta * theta * g->stddev * g->stddev);
    double m = 0.0;
    for (const auto& [x, p] : std::get<DiscreteJump>(d).atoms) m += p * std::exp(theta * x);
    return m;
}

double jump_mgf_prime(const JumpDist& d, double theta) {
    if (const auto* de = std::get_if<DoubleExpJump>(&d)) {
        double m = 0.0;
        const double dp = de->eta_plus - theta;
        const double dm = de->eta_minus + theta;
        if (de->p > 0.0) m += de->p * de->eta_plus / (dp * dp);
        if (de->p < 1.0) m -= (1.0 - de->p) * de->eta_minus / (dm * dm);
        return m;
    }
    if (const auto* g = std::get_if<GaussianJump>(&d))
        return (g->mean + theta * g->stddev * g->stddev) * jump_mgf(d, theta);
    double m = 0.0;
    for (const auto& [x, p] : std::get<DiscreteJump>(d).atoms)
        m += p * x * std::exp(theta * x);
    return m;
}

double jump_mgf_second(const JumpDist& d, double theta) {
    if (const auto* de = std::get_if<DoubleExpJump>(&d)) {
        double m = 0.0;
        const double dp = de->eta_plus - theta;
        const double dm = de->eta_minus + theta;
        if (de->p > 0.0) m += 2.0 * de->p * de->eta_plus / (dp * dp * dp);
        if (de->p < 1.0) m += 2.0 * (1.0 - de->p) * de->eta_minus / (dm * dm * dm);
        return m;
    }
    if (const auto* g = std::get_if<GaussianJump>(&d)) {
        const double s2 = g->stddev * g->stddev;
        const double a = g->mean + theta * s2;
        return (a * a + s2) * jump_mgf(d, theta);
    }
    double m = 0.0;
    for (const auto& [x, p] : std::get<DiscreteJump>(d).atoms)
        m += p * x * x * std::exp(theta * x);
    return m;
}

double jump_mean(const JumpDist& d) { return jump_mgf_prime(d, 0.0); }

double jump_compensator_m1(const JumpDist& d) {
    if (const auto* de = std::get_if<DoubleExpJump>(&d)) {
        // int_0^1 x eta e^{-eta x} dx = (1 - (1 + eta) e^{-eta}) / eta
        auto part = [](double eta) {
            return (1.0 - (1.0 + eta) * std::exp(-eta)) / eta;
        };
        return de->p * part(de->eta_plus) - (1.0 - de->p) * part(de->eta_minus);
    }
    if (const auto* g = std::get_if<GaussianJump>(&d)) {
        const double a = (-1.0 - g->mean) / g->stddev;
        const double b = (1.0 - g->mean) / g->stddev;
        return g->mean * (norm_cdf(b) - norm_cdf(a)) +
               g->stddev * (norm_pdf(a) - norm_pdf(b));
    }
    double m = 0.0;
    for (const auto& [x, p] : std::get<DiscreteJump>(d).atoms)
        if (std::abs(x) < 1.0) m += p * x;
    return m;
}

std::pair<double, double> jump_mgf_domain(const JumpDist& d) {
    if (const auto* de = std::get_if<DoubleExpJump>(&d)) {
        const double hi = de->p > 0.0 ? de->eta_plus : kInf;
        const double lo = de->p < 1.0 ? -de->eta_minus : -kInf;
        return {lo, hi};
    }
    return {-kInf, kInf};
}

double jump_sample(const JumpDist& d, Rng& rng) {
    if (const auto* de = std::get_if<DoubleExpJump>(&d)) {
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::exponential_distribution<double> pos(de->eta_plus), neg(de->eta_minus);
        return unif(rng) < de->p ? pos(rng) : -neg(rng);
    }
    if (const auto* g = std::get_if<GaussianJump>(&d)) {
        std::normal_distribution<double> n(g->mean, g->stddev);
        return n(rng);
    }
    const auto& atoms = std::get<DiscreteJump>(d).atoms;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double u = unif(rng);
    for (const auto& [x, p] : atoms) {
        if (u < p) return x;
        u -= p;
    }
    return atoms.back().first;
}

double jump_cell_mass(const JumpDist& d, double a, double b) {
    if (b <= a) return 0.0;
    if (const auto* de = std::get_if<DoubleExpJump>(&d)) {
        auto cdf = [&](double x) {
            if (x < 0.0) return (1.0 - de->p) * std::exp(de->eta_minus * x);
            return (1.0 - de->p) + de->p * (1.0 - std::exp(-de->eta_plus * x));
        };
        return cdf(b) - cdf(a);
    }
    if (const auto* g = std::get_if<GaussianJump>(&d))
        return norm_cdf((b - g->mean) / g->stddev) - norm_cdf((a - g->mean) / g->stddev);
    double m = 0.0;
    for (const auto& [x, p] : std::get<DiscreteJump>(d).atoms)
        if (x > a && x <= b) m += p;
    return m;
}

JumpDist jump_reflect(const JumpDist& d) {
    if (const auto* de = std::get_if<DoubleExpJump>(&d))
        return DoubleExpJump{1.0 - de->p, de->eta_minus, de->eta_plus};
    if (const auto* g = std::get_if<GaussianJump>(&d))
        return GaussianJump{-g->mean, g->stddev};
    DiscreteJump out;
    for (const auto& [x, p] : std::get<DiscreteJump>(d).atoms)
        out.atoms.emplace_back(-x, p);
    std::sort(out.atoms.begin(), out.atoms.end());
    return out;
}

JumpDist jump_tilt(const JumpDist& d, double theta) {
    const auto [lo, hi] = jump_mgf_domain(d);
    if (!(theta > lo && theta < hi))
        throw DomainError("jump tilt parameter outside MGF domain");
    const double mtheta = jump_mgf(d, theta);
    if (const auto* de = std::get_if<DoubleExpJump>(&d)) {
        // Each exponential branch stays exponential with shifted rate; the
        // branch probabilities are reweighted by their tilted masses.
        DoubleExpJump t;
        t.eta_plus = de->eta_plus - theta;
        t.eta_minus = de->eta_minus + theta;
        const double pos_mass =
            de->p > 0.0 ? de->p * de->eta_plus / (de->eta_plus - theta) : 0.0;
        t.p = pos_mass / mtheta;
        return t;
    }
    if (const auto* g = std::get_if<GaussianJump>(&d))
        return GaussianJump{g->mean + theta * g->stddev * g->stddev, g->stddev};
    DiscreteJump out = std::get<DiscreteJump>(d);
    for (auto& [x, p] : out.atoms) p *= std::exp(theta * x) / mtheta;
    return out;
}

LevyTriplet::LevyTriplet(double b, double sigma, JumpSpec jumps)
    : b_(b), sigma_(sigma), jumps_(std::move(jumps)) {
    if (!(sigma_ > 0.0)) throw std::invalid_argument("sigma must be positive");
    if (jumps_.rate < 0.0) throw std::invalid_argument("jump rate must be nonnegative");
    if (jumps_.rate > 0.0) validate_jump_dist(jumps_.dist);
    b_eff_ = b_ - jumps_.rate * (jumps_.rate > 0.0 ? jump_compensator_m1(jumps_.dist) : 0.0);
    domain_ = jumps_.rate > 0.0 ? jump_mgf_domain(jumps_.dist)
                                : std::pair<double, double>{-kInf, kInf};
}

bool LevyTriplet::in_domain(double theta) const {
    return theta > domain_.first && theta < domain_.second;
}

double LevyTriplet::psi(double theta) const {
    if (!in_domain(theta))
        throw DomainError("theta outside (theta*-, theta*+)");
    double v = b_eff_ * theta + 0.5 * sigma_ * sigma_ * theta * theta;
    if (jumps_.rate > 0.0) v += jumps_.rate * (jump_mgf(jumps_.dist, theta) - 1.0);
    return v;
}

double LevyTriplet::psi_prime(double theta) const {
    if (!in_domain(theta))
        throw DomainError("theta outside (theta*-, theta*+)");
    double v = b_eff_ + sigma_ * sigma_ * theta;
    if (jumps_.rate > 0.0) v += jumps_.rate * jump_mgf_prime(jumps_.dist, theta);
    return v;
}

double LevyTriplet::psi_second(double theta) const {
    if (!in_domain(theta))
        throw DomainError("theta outside (theta*-, theta*+)");
    double v = sigma_ * sigma_;
    if (jumps_.rate > 0.0) v += jumps_.rate * jump_mgf_second(jumps_.dist, theta);
    return v;
}

double LevyTriplet::mean() const { return psi_prime(0.0); }
double LevyTriplet::variance_rate() const { return psi_second(0.0); }

LevyTriplet center(const LevyTriplet& m) {
    return LevyTriplet(m.b() - m.mean(), m.sigma(), m.jumps());
}

namespace {

// Solve psi'(theta) = alpha by bracket growth from 0 plus safeguarded Newton.
// Strict convexity (sigma > 0) makes psi' increasing, and for the finite
// activity families psi' diverges at every domain endpoint, so a bracket
// always exists. The endpoint-limit fallback below is kept for inputs where
// growth stalls against a finite endpoint.
struct PsiPrimeRoot {
    double theta;
    bool at_endpoint;
};

PsiPrimeRoot solve_psi_prime(const LevyTriplet& m, double alpha) {
    const auto [dlo, dhi] = m.theta_star();
    auto clip_toward = [](double from, double endpoint) {
        if (std::isinf(endpoint)) return from;
        return from + 0.5 * (endpoint - from);
    };

    double lo = 0.0, hi = 0.0;
    double f0 = m.psi_prime(0.0) - alpha;
    if (f0 == 0.0) return {0.0, false};
    const bool up = f0 < 0.0;  // root lies above 0
    double step = 1.0;
    double cur = 0.0;
    for (int i = 0; i < 400; ++i) {
        double nxt = up ? cur + step : cur - step;
        if (up && nxt >= dhi) nxt = clip_toward(cur, dhi);
        if (!up && nxt <= dlo) nxt = clip_toward(cur, dlo);
        const double f = m.psi_prime(nxt) - alpha;
        if ((up && f >= 0.0) || (!up && f <= 0.0)) {
            lo = up ? cur : nxt;
            hi = up ? nxt : cur;
            break;
        }
        cur = nxt;
        step *= 2.0;
        if (i == 399) return {cur, true};  // stalled against an endpoint
    }

    double theta = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double f = m.psi_prime(theta) - alpha;
        if (std::abs(f) <= 1e-12 * std::max(1.0, std::abs(alpha))) return {theta, false};
        if (f > 0.0) hi = theta; else lo = theta;
        const double d = m.psi_second(theta);
        double next = theta - f / d;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - theta) <= 1e-15 * std::max(1.0, std::abs(theta)))
            return {next, false};
        theta = next;
    }
    throw ConvergenceError("psi'(theta) = alpha: no convergence in 200 iterations");
}

} // namespace

double legendre(const LevyTriplet& m, double alpha) {
    // When growth stalls against a finite endpoint (not reachable for the
    // built-in families, where psi' diverges there) this evaluates the
    // endpoint limit value.
    const auto root = solve_psi_prime(m, alpha);
    return alpha * root.theta - m.psi(root.theta);
}

double legendre_dual(const LevyTriplet& m, double alpha) {
    return legendre(dual_reflect(m), alpha);
}

GammaPoint gamma_point(const LevyTriplet& m, double c) {
    const auto root = solve_psi_prime(m, c);
    return {root.theta, c * root.theta - m.psi(root.theta)};
}

double gamma_inverse(const LevyTriplet& m, double r) {
    if (r < 0.0) throw RangeError("gamma_inverse: r must be nonnegative");
    if (r == 0.0) return 0.0;
    double hi = 1.0;
    int grow = 0;
    while (legendre(m, hi) < r) {
        hi *= 2.0;
        if (++grow > 60) throw RangeError("gamma_inverse: r exceeds sup Gamma");
    }
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (legendre(m, mid) < r) lo = mid; else hi = mid;
        if (hi - lo <= 1e-12 * std::max(1.0, hi)) break;
    }
    return 0.5 * (lo + hi);
}

bool is_critical(double r, double gamma_c) {
    return std::abs(r - gamma_c) <= 1e-9 * std::max(1.0, r);
}

double qsd_theta(const LevyTriplet& m, double c, double r) {
    if (!(c > 0.0) || !(r > 0.0))
        throw std::invalid_argument("qsd_theta: c and r must be positive");
    const GammaPoint gp = gamma_point(m, c);
    if (is_critical(r, gp.gamma)) return gp.theta_c;
    if (r > gp.gamma) throw NoRoot(r, gp.gamma);

    // Smaller root of the convex phi(theta) = psi(theta) - c theta + r on
    // [0, theta_c]: phi(0) = r > 0, phi(theta_c) = r - Gamma(c) < 0.
    auto phi = [&](double th) { return m.psi(th) - c * th + r; };
    double lo = 0.0, hi = gp.theta_c;
    double theta = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double f = phi(theta);
        if (std::abs(f) < 1e-12) return theta;
        if (f > 0.0) lo = theta; else hi = theta;
        const double d = m.psi_prime(theta) - c;
        double next = d != 0.0 ? theta - f / d : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        theta = next;
    }
    if (std::abs(phi(theta)) < 1e-10) return theta;
    throw ConvergenceError("qsd_theta: root refinement failed");
}

LevyTriplet dual_reflect(const LevyTriplet& m) {
    JumpSpec js = m.jumps();
    if (js.rate > 0.0) js.dist = jump_reflect(js.dist);
    return LevyTriplet(-m.b(), m.sigma(), js);
}

namespace {

// Triplet with a prescribed unit-time mean: psi'(0) = mean.
LevyTriplet triplet_with_mean(double mean, double sigma, JumpSpec js) {
    double b = mean;
    if (js.rate > 0.0)
        b += js.rate * (jump_compensator_m1(js.dist) - jump_mean(js.dist));
    return LevyTriplet(b, sigma, std::move(js));
}

} // namespace

TiltedModel esscher_tilt(const LevyTriplet& m, double theta, double c) {
    if (!m.in_domain(theta)) throw DomainError("esscher_tilt: theta outside domain");
    JumpSpec js;
    if (m.jumps().rate > 0.0) {
        js.rate = m.jumps().rate * jump_mgf(m.jumps().dist, theta);
        js.dist = jump_tilt(m.jumps().dist, theta);
    }
    const double mean = m.psi_prime(theta) - c;
    return TiltedModel{m, theta, c, triplet_with_mean(mean, m.sigma(), std::move(js))};
}

TiltedModel qsd_dual_process(const LevyTriplet& m, double theta, double c) {
    TiltedModel t = esscher_tilt(m, theta, c);
    return TiltedModel{m, theta, c, dual_reflect(t.process)};
}

namespace {

JumpDist jump_dist_from_json(const nlohmann::json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "double_exp") {
        return DoubleExpJump{j.at("p").get<double>(), j.at("eta_plus").get<double>(),
                             j.at("eta_minus").get<double>()};
    }
    if (type == "gaussian")
        return GaussianJump{j.at("mean").get<double>(), j.at("std").get<double>()};
    if (type == "discrete") {
        DiscreteJump d;
        for (const auto& a : j.at("atoms"))
            d.atoms.emplace_back(a.at(0).get<double>(), a.at(1).get<double>());
        return d;
    }
    throw ConfigError("unknown jump distribution type: " + type);
}

nlohmann::json jump_dist_to_json(const JumpDist& d) {
    nlohmann::json j;
    if (const auto* de = std::get_if<DoubleExpJump>(&d)) {
        j["type"] = "double_exp";
        j["p"] = de->p;
        j["eta_plus"] = de->eta_plus;
        j["eta_minus"] = de->eta_minus;
    } else if (const auto* g = std::get_if<GaussianJump>(&d)) {
        j["type"] = "gaussian";
        j["mean"] = g->mean;
        j["std"] = g->stddev;
    } else {
        j["type"] = "discrete";
        j["atoms"] = nlohmann::json::array();
        for (const auto& [x, p] : std::get<DiscreteJump>(d).atoms)
            j["atoms"].push_back({x, p});
    }
    return j;
}

} // namespace

LevyTriplet model_from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("model JSON parse error: ") + e.what());
    }
    try {
        const double b = j.at("b").get<double>();
        const double sigma = j.at("sigma").get<double>();
        JumpSpec js;
        if (j.contains("jump")) {
            js.rate = j["jump"].at("rate").get<double>();
            if (js.rate > 0.0) js.dist = jump_dist_from_json(j["jump"].at("dist"));
        }
        LevyTriplet m(b, sigma, std::move(js));
        if (j.value("center", false)) m = center(m);
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("model JSON schema error: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid model: ") + e.what());
    }
}

std::string model_to_json_text(const LevyTriplet& m) {
    nlohmann::ordered_json j;
    j["b"] = m.b();
    j["sigma"] = m.sigma();
    j["jump"]["rate"] = m.jumps().rate;
    if (m.jumps().rate > 0.0) j["jump"]["dist"] = jump_dist_to_json(m.jumps().dist);
    return j.dump(2);
}

} // namespace levywave
