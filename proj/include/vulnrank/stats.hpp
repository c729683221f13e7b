#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>

namespace vulnrank {

class StatsError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// P(T <= t) for Student's t with `df` > 0 degrees of freedom.
double student_t_cdf(double t, double df);

struct TTestResult {
    std::size_t n{0};
    double mean_diff{0.0};
    double sd_diff{0.0};
    double t{0.0};
    double df{0.0};
    // Upper tail P(T >= t): evidence that a exceeds b.
    double p_one_sided{1.0};
    double p_two_sided{1.0};
};

// Paired test on d_i = a_i - b_i with the sample standard deviation.
// Throws StatsError on length mismatch, n < 2, non-finite input or zero variance.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

double mean(std::span<const double> xs);
// n - 1 denominator; 0 for fewer than two values.
double sample_sd(std::span<const double> xs);

}  // namespace vulnrank
