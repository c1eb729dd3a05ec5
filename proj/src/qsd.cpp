#include "levywave/qsd.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "levywave/errors.hpp"
#include "levywave/parallel.hpp"
#include "levywave/stats.hpp"

namespace levywave {

QSDensity::QSDensity(std::vector<double> grid, std::vector<double> values,
                     double theta, double c, double r, std::uint64_t seed)
    : grid_(std::move(grid)), values_(std::move(values)), theta_(theta), c_(c),
      r_(r), seed_(seed) {
    if (grid_.size() != values_.size() || grid_.empty())
        throw std::invalid_argument("QSDensity: grid/values mismatch");
    if (!std::is_sorted(grid_.begin(), grid_.end()) || grid_.front() <= 0.0)
        throw std::invalid_argument("QSDensity: grid must be ascending and positive");
    for (double v : values_)
        if (v < 0.0) throw std::invalid_argument("QSDensity: negative value");

    // Trapezoid integral including the implicit (0, 0) node.
    double total = 0.5 * grid_.front() * values_.front();
    for (std::size_t i = 1; i < grid_.size(); ++i)
        total += 0.5 * (grid_[i] - grid_[i - 1]) * (values_[i] + values_[i - 1]);
    if (!(total > 0.0)) throw std::invalid_argument("QSDensity: zero mass");
    normalization_ = total;
    for (double& v : values_) v /= total;

    cum_.resize(grid_.size());
    double acc = 0.5 * grid_.front() * values_.front();
    cum_[0] = acc;
    for (std::size_t i = 1; i < grid_.size(); ++i) {
        acc += 0.5 * (grid_[i] - grid_[i - 1]) * (values_[i] + values_[i - 1]);
        cum_[i] = acc;
    }
    cum_.back() = std::max(cum_.back(), 1.0);  // guard the top for quantile()
}

double QSDensity::pdf(double x) const {
    if (x <= 0.0 || x > grid_.back()) return 0.0;
    const auto it = std::lower_bound(grid_.begin(), grid_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - grid_.begin());
    const double x1 = i == 0 ? 0.0 : grid_[i - 1];
    const double v1 = i == 0 ? 0.0 : values_[i - 1];
    const double w = (x - x1) / (grid_[i] - x1);
    return v1 + w * (values_[i] - v1);
}

double QSDensity::cdf(double x) const {
    if (x <= 0.0) return 0.0;
    if (x >= grid_.back()) return 1.0;
    const auto it = std::lower_bound(grid_.begin(), grid_.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - grid_.begin());
    const double x1 = i == 0 ? 0.0 : grid_[i - 1];
    const double c1 = i == 0 ? 0.0 : cum_[i - 1];
    const double v1 = i == 0 ? 0.0 : values_[i - 1];
    const double w = x - x1;
    const double v = pdf(x);
    return std::min(1.0, c1 + 0.5 * w * (v1 + v));
}

double QSDensity::quantile(double u) const {
    u = std::clamp(u, 0.0, 1.0);
    const auto it = std::lower_bound(cum_.begin(), cum_.end(), u);
    const std::size_t i = static_cast<std::size_t>(it - cum_.begin());
    if (i >= grid_.size()) return grid_.back();
    const double x1 = i == 0 ? 0.0 : grid_[i - 1];
    const double c1 = i == 0 ? 0.0 : cum_[i - 1];
    const double seg = cum_[i] - c1;
    const double w = seg > 0.0 ? (u - c1) / seg : 1.0;
    return x1 + w * (grid_[i] - x1);
}

double QSDensity::ks_to_cdf(const std::function<double(double)>& other_cdf) const {
    double d = 0.0;
    for (std::size_t i = 0; i < grid_.size(); ++i)
        d = std::max(d, std::abs(cum_[i] - other_cdf(grid_[i])));
    return d;
}

double QSDensity::mean() const {
    // trapezoid of x*v(x), with the implicit zero node at the origin
    double m = 0.5 * grid_.front() * grid_.front() * values_.front();
    for (std::size_t i = 1; i < grid_.size(); ++i)
        m += 0.5 * (grid_[i] - grid_[i - 1]) *
             (grid_[i] * values_[i] + grid_[i - 1] * values_[i - 1]);
    return m;
}

std::vector<double> make_qsd_grid(double theta, std::size_t points) {
    if (!(theta > 0.0)) throw std::invalid_argument("make_qsd_grid: theta <= 0");
    const double x_max = 20.0 / theta;
    std::vector<double> g(points);
    for (std::size_t i = 0; i < points; ++i)
        g[i] = x_max * static_cast<double>(i + 1) / static_cast<double>(points);
    return g;
}

QsdRegime qsd_regime(const LevyTriplet& m, double c, double r) {
    const GammaPoint gp = gamma_point(m, c);
    if (is_critical(r, gp.gamma)) return QsdRegime::Critical;
    return r < gp.gamma ? QsdRegime::Exists : QsdRegime::NonExistence;
}

QSDensity qsd_density_formula(const LevyTriplet& m, double c, double r,
                              const std::vector<double>& grid,
                              std::size_t n_paths, const PathConfig& cfg) {
    const double theta = qsd_theta(m, c, r);  // throws NoRoot beyond the boundary
    const TiltedModel dual = qsd_dual_process(m, theta, c);
    const std::vector<double> h = ladder_renewal(dual, grid, n_paths, cfg);
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        v[i] = std::exp(-theta * grid[i]) * h[i];
    return QSDensity(grid, std::move(v), theta, c, r, cfg.seed);
}

QSDensity qsd_closed_form_brownian(double sigma, double c, double r,
                                   const std::vector<double>& grid) {
    if (!(sigma > 0.0) || !(c > 0.0))
        throw RangeError("qsd_closed_form_brownian: need sigma > 0, c > 0");
    const double s2 = sigma * sigma;
    const double rmax = c * c / (2.0 * s2);
    if (!(r > 0.0) || r > rmax * (1.0 + 1e-12))
        throw RangeError("qsd_closed_form_brownian: r outside (0, c^2/(2 sigma^2)]");
    std::vector<double> v(grid.size());
    if (std::abs(r - rmax) <= 1e-12 * rmax) {
        for (std::size_t i = 0; i < grid.size(); ++i)
            v[i] = grid[i] * std::exp(-c * grid[i] / s2);
    } else {
        const double s = std::sqrt(c * c - 2.0 * r * s2);
        for (std::size_t i = 0; i < grid.size(); ++i)
            v[i] = std::exp(-c * grid[i] / s2) * std::sinh(s * grid[i] / s2);
    }
    return QSDensity(grid, std::move(v), c / s2, c, r, 0);
}

QsdVerifyReport verify_qsd(const LevyTriplet& m, double c, double r,
                           const QSDensity& nu, double t, std::size_t n_paths,
                           const PathConfig& cfg) {
    QsdVerifyReport rep;
    rep.t = t;
    rep.n_paths = n_paths;
    rep.survival_expected = std::exp(-r * t);
    rep.mean_tau_target = r > 0.0 ? 1.0 / r : 0.0;

    // Starting points from nu by inverse CDF.
    std::vector<double> starts(n_paths);
    {
        Rng rng = make_stream(cfg.seed, 0xA11CEULL);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        for (auto& x : starts) x = nu.quantile(unif(rng));
    }

    if (t > 0.0) {
        const YaglomResult yr = evolve_conditioned(m, c, starts, t, cfg, 1);
        rep.survival = yr.survival_fraction;
        rep.survival_se = std::sqrt(std::max(
            0.0, rep.survival * (1.0 - rep.survival) / static_cast<double>(n_paths)));
        rep.ks_conditioned =
            yr.law.ks_to_cdf([&](double x) { return nu.cdf(x); });
    } else {
        rep.survival = 1.0;
        const EmpiricalDistribution start_law(starts);
        rep.ks_conditioned =
            start_law.ks_to_cdf([&](double x) { return nu.cdf(x); });
    }

    // Absorption times, censor-corrected at cfg.horizon.
    const FirstPassageSample fp = first_passage_from(m, c, starts, cfg, 2);
    rep.censored_fraction = fp.censored_fraction;

    // Exponential tail rate from the empirical survival curve over the upper
    // half of the horizon.
    {
        std::vector<double> ts, logsurv;
        const int npts = 12;
        std::vector<double> sorted_tau = fp.tau;
        std::sort(sorted_tau.begin(), sorted_tau.end());
        const double n = static_cast<double>(sorted_tau.size());
        for (int j = 0; j < npts; ++j) {
            const double tj =
                fp.horizon * (0.45 + 0.5 * static_cast<double>(j) / (npts - 1));
            const auto it =
                std::upper_bound(sorted_tau.begin(), sorted_tau.end(), tj);
            const double surv =
                (n - static_cast<double>(it - sorted_tau.begin())) / n;
            if (surv > 0.0) {
                ts.push_back(tj);
                logsurv.push_back(std::log(surv));
            }
        }
        rep.decay_rate_fit =
            ts.size() >= 3 ? -fit_line(ts, logsurv).slope : r;
        if (!(rep.decay_rate_fit > 0.0)) rep.decay_rate_fit = r;
    }

    double acc = 0.0;
    for (std::size_t i = 0; i < fp.tau.size(); ++i)
        acc += fp.censored[i] ? fp.horizon + 1.0 / rep.decay_rate_fit : fp.tau[i];
    rep.mean_tau = acc / static_cast<double>(fp.tau.size());
    return rep;
}

std::vector<YaglomStage> yaglom_convergence(const LevyTriplet& m, double c,
                                            double x0,
                                            const std::vector<double>& schedule,
                                            std::size_t n_paths,
                                            const PathConfig& cfg) {
    if (schedule.empty() || !std::is_sorted(schedule.begin(), schedule.end()))
        throw std::invalid_argument("yaglom_convergence: schedule must be increasing");
    std::vector<YaglomStage> stages;
    std::vector<double> starts(n_paths, x0);
    double t_prev = 0.0;
    for (std::size_t k = 0; k < schedule.size(); ++k) {
        const double span = schedule[k] - t_prev;
        YaglomStage stage;
        stage.t = schedule[k];
        stage.result = evolve_conditioned(m, c, starts, span, cfg, k + 1);
        t_prev = schedule[k];
        if (k + 1 < schedule.size()) {
            Rng rng = make_stream(cfg.seed, 0x5E5A0000ULL + k);
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            for (auto& x : starts) x = stage.result.law.quantile(unif(rng));
        }
        stages.push_back(std::move(stage));
    }
    const EmpiricalDistribution& final_law = stages.back().result.law;
    for (auto& st : stages) st.ks_to_final = st.result.law.ks_to(final_law);
    return stages;
}

} // namespace levywave
