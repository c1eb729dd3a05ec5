#include "levywave/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "levywave/parallel.hpp"

namespace levywave {

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> samples,
                                             std::vector<double> weights) {
    if (!weights.empty() && weights.size() != samples.size())
        throw std::invalid_argument("weights/samples size mismatch");
    const std::size_t n = samples.size();
    if (n == 0) return;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return samples[a] < samples[b]; });

    samples_.resize(n);
    weights_.resize(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        samples_[i] = samples[order[i]];
        const double w = weights.empty() ? 1.0 : weights[order[i]];
        if (w < 0.0) throw std::invalid_argument("negative weight");
        weights_[i] = w;
        total += w;
    }
    if (total <= 0.0) throw std::invalid_argument("zero total weight");
    cum_.resize(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        weights_[i] /= total;
        acc += weights_[i];
        cum_[i] = acc;
    }
    cum_.back() = 1.0;
}

double EmpiricalDistribution::cdf(double x) const {
    if (samples_.empty()) return 0.0;
    auto it = std::upper_bound(samples_.begin(), samples_.end(), x);
    if (it == samples_.begin()) return 0.0;
    return cum_[static_cast<std::size_t>(it - samples_.begin()) - 1];
}

double EmpiricalDistribution::quantile(double u) const {
    if (samples_.empty()) throw std::logic_error("quantile of empty distribution");
    u = std::clamp(u, 0.0, 1.0);
    auto it = std::lower_bound(cum_.begin(), cum_.end(), u);
    if (it == cum_.end()) return samples_.back();
    return samples_[static_cast<std::size_t>(it - cum_.begin())];
}

double EmpiricalDistribution::mean() const {
    double m = 0.0;
    for (std::size_t i = 0; i < samples_.size(); ++i) m += samples_[i] * weights_[i];
    return m;
}

double EmpiricalDistribution::ks_to_cdf(const std::function<double(double)>& cdf) const {
    double d = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        const double f = cdf(samples_[i]);
        d = std::max(d, std::abs(cum_[i] - f));
        d = std::max(d, std::abs(prev - f));
        prev = cum_[i];
    }
    return d;
}

double EmpiricalDistribution::ks_to(const EmpiricalDistribution& other) const {
    double d = 0.0;
    std::size_t i = 0, j = 0;
    double fa = 0.0, fb = 0.0;
    while (i < samples_.size() || j < other.samples_.size()) {
        double xa = i < samples_.size() ? samples_[i]
                                        : std::numeric_limits<double>::infinity();
        double xb = j < other.samples_.size() ? other.samples_[j]
                                              : std::numeric_limits<double>::infinity();
        if (xa <= xb) fa = cum_[i++];
        if (xb <= xa) fb = other.cum_[j++];
        d = std::max(d, std::abs(fa - fb));
    }
    return d;
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_line needs >= 2 points");
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("degenerate abscissae");
    LinearFit fit;
    fit.n = n;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = y[i] - (fit.intercept + fit.slope * x[i]);
        sse += e * e;
    }
    fit.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
    fit.slope_se = n > 2 ? std::sqrt(sse / (static_cast<double>(n) - 2.0) / sxx) : 0.0;
    return fit;
}

MeanSE mean_se(const std::vector<double>& values) {
    MeanSE out;
    out.n = values.size();
    if (out.n == 0) return out;
    const std::size_t nchunks = chunk_count(out.n);
    std::vector<double> s1(nchunks, 0.0), s2(nchunks, 0.0);
    for (std::size_t ci = 0; ci < nchunks; ++ci) {
        const std::size_t b = ci * kChunkSize;
        const std::size_t e = std::min(values.size(), b + kChunkSize);
        double a = 0.0, q = 0.0;
        for (std::size_t i = b; i < e; ++i) {
            a += values[i];
            q += values[i] * values[i];
        }
        s1[ci] = a;
        s2[ci] = q;
    }
    const double n = static_cast<double>(out.n);
    const double sum = pairwise_sum(s1);
    const double sumsq = pairwise_sum(s2);
    out.mean = sum / n;
    out.var = out.n > 1 ? std::max(0.0, (sumsq - sum * sum / n) / (n - 1.0)) : 0.0;
    out.se = std::sqrt(out.var / n);
    return out;
}

double chi2_upper_quantile(double dof, double p_tail) {
    // Wilson-Hilferty: chi2_p ~ dof * (1 - 2/(9 dof) + z_p sqrt(2/(9 dof)))^3.
    // Inverse normal via Acklam-style rational fit is overkill here; the few
    // tail levels we use are hardcoded.
    double z;
    if (p_tail <= 0.001) z = 3.0902;
    else if (p_tail <= 0.01) z = 2.3263;
    else if (p_tail <= 0.05) z = 1.6449;
    else z = 1.2816;
    const double a = 2.0 / (9.0 * dof);
    const double c = 1.0 - a + z * std::sqrt(a);
    return dof * c * c * c;
}

} // namespace levywave
