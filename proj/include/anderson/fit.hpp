#pragma once

#include <cstddef>
#include <span>

namespace anderson {

/// Empirical probability with a 95% Wilson score interval.
struct BinomialEstimate {
    std::size_t successes = 0;
    std::size_t trials = 0;
    double probability = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

BinomialEstimate binomial_estimate(std::size_t successes, std::size_t trials);

/// Weighted least-squares line y = intercept + slope * x.
struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    /// Standard error from the weights, inflated by sqrt(chi2 / dof) when that
    /// exceeds 1.
    double slope_stderr = 0.0;
    double chi2 = 0.0;
    std::size_t dof = 0;
};

/// Weights are inverse variances. Throws InvalidArgument for fewer than two
/// points, mismatched lengths, or a degenerate design.
LinearFit weighted_linear_fit(std::span<const double> x, std::span<const double> y,
                              std::span<const double> w);

}  // namespace anderson
