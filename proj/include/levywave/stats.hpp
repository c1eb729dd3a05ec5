#ifndef LEVYWAVE_STATS_HPP
#define LEVYWAVE_STATS_HPP

#include <cstddef>
#include <functional>
#include <vector>

namespace levywave {

/**
 * Weighted empirical law on the line. Samples are kept sorted; weights are
 * nonnegative and normalized to sum to one (uniform when none are given).
 */
class EmpiricalDistribution {
public:
    EmpiricalDistribution() = default;
    explicit EmpiricalDistribution(std::vector<double> samples,
                                   std::vector<double> weights = {});

    const std::vector<double>& samples() const { return samples_; }
    const std::vector<double>& weights() const { return weights_; }
    std::size_t n_effective() const { return samples_.size(); }
    bool empty() const { return samples_.empty(); }

    // Right-continuous CDF.
    double cdf(double x) const;
    // Generalized inverse CDF; u in [0,1].
    double quantile(double u) const;

    double mean() const;

    // sup_x |F_n(x) - F(x)| against an analytic CDF.
    double ks_to_cdf(const std::function<double(double)>& cdf) const;
    // Two-sample sup distance.
    double ks_to(const EmpiricalDistribution& other) const;

private:
    std::vector<double> samples_;
    std::vector<double> weights_;    // normalized
    std::vector<double> cum_;        // cumulative weights, cum_.back() == 1
};

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
    double r2 = 0.0;
    std::size_t n = 0;
};

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Mean and standard error of a sample, combined pairwise from fixed-size
// chunk partials so the result does not depend on the thread count.
struct MeanSE {
    double mean = 0.0;
    double se = 0.0;
    double var = 0.0;
    std::size_t n = 0;
};

MeanSE mean_se(const std::vector<double>& values);

// Upper quantile of chi^2 via the Wilson-Hilferty cube approximation.
double chi2_upper_quantile(double dof, double p_tail);

} // namespace levywave

#endif
