#include "vulnrank/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

namespace vulnrank {

double student_t_cdf(double t, double df)
{
    if (!(df > 0.0) || std::isnan(t)) {
        throw StatsError("student_t_cdf: df must be positive and t a number");
    }
    if (std::isinf(t)) {
        return t > 0 ? 1.0 : 0.0;
    }
    // P(|T| > |t|) = I_x(df/2, 1/2) with x = df / (df + t^2).
    const double x = df / (df + t * t);
    const double tail = 0.5 * boost::math::ibeta(df / 2.0, 0.5, x);
    return t > 0 ? 1.0 - tail : tail;
}

double mean(std::span<const double> xs)
{
    if (xs.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (double x : xs) {
        sum += x;
    }
    return sum / static_cast<double>(xs.size());
}

double sample_sd(std::span<const double> xs)
{
    if (xs.size() < 2) {
        return 0.0;
    }
    const double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) {
        ss += (x - m) * (x - m);
    }
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size()) {
        throw StatsError("paired_t_test: series lengths differ (" + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + ")");
    }
    if (a.size() < 2) {
        throw StatsError("paired_t_test: need at least 2 pairs, got " + std::to_string(a.size()));
    }
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        d[i] = a[i] - b[i];
        if (!std::isfinite(d[i])) {
            throw StatsError("paired_t_test: non-finite value at pair " + std::to_string(i));
        }
    }
    TTestResult r;
    r.n = d.size();
    r.mean_diff = mean(d);
    r.sd_diff = sample_sd(d);
    if (r.sd_diff == 0.0) {
        throw StatsError("paired_t_test: zero variance in differences (mean difference " +
                         std::to_string(r.mean_diff) + ")");
    }
    r.t = r.mean_diff / (r.sd_diff / std::sqrt(static_cast<double>(r.n)));
    r.df = static_cast<double>(r.n - 1);
    const double cdf = student_t_cdf(r.t, r.df);
    r.p_one_sided = 1.0 - cdf;
    if (r.t > 0) {
        // Use the direct tail to keep precision for large t.
        r.p_one_sided = 0.5 * boost::math::ibeta(r.df / 2.0, 0.5, r.df / (r.df + r.t * r.t));
    }
    r.p_two_sided = std::min(1.0, 2.0 * std::min(r.p_one_sided, 1.0 - r.p_one_sided));
    if (r.t < 0) {
        r.p_two_sided = std::min(1.0, 2.0 * cdf);
    }
    return r;
}

}  // namespace vulnrank
