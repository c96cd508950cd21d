#include "anderson/fit.hpp"

#include <algorithm>
#include <cmath>

#include "anderson/errors.hpp"

namespace anderson {

BinomialEstimate binomial_estimate(std::size_t successes, std::size_t trials) {
    BinomialEstimate e;
    e.successes = successes;
    e.trials = trials;
    if (trials == 0) return e;
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    constexpr double z = 1.959963984540054;
    const double denom = 1.0 + z * z / n;
    const double centre = (p + z * z / (2 * n)) / denom;
    const double half = z * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom;
    e.probability = p;
    e.ci_low = std::max(0.0, centre - half);
    e.ci_high = std::min(1.0, centre + half);
    return e;
}

LinearFit weighted_linear_fit(std::span<const double> x, std::span<const double> y,
                              std::span<const double> w) {
    if (x.size() != y.size() || x.size() != w.size())
        throw InvalidArgument("weighted_linear_fit: length mismatch");
    if (x.size() < 2) throw InvalidArgument("weighted_linear_fit: need at least two points");

    double s = 0, sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        s += w[i];
        sx += w[i] * x[i];
        sy += w[i] * y[i];
    }
    const double xbar = sx / s, ybar = sy / s;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += w[i] * (x[i] - xbar) * (x[i] - xbar);
        sxy += w[i] * (x[i] - xbar) * (y[i] - ybar);
    }
    if (!(sxx > 0)) throw InvalidArgument("weighted_linear_fit: degenerate abscissae");

    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = ybar - fit.slope * xbar;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - fit.intercept - fit.slope * x[i];
        fit.chi2 += w[i] * r * r;
    }
    fit.dof = x.size() - 2;
    double inflation = 1.0;
    if (fit.dof > 0) inflation = std::max(1.0, fit.chi2 / static_cast<double>(fit.dof));
    fit.slope_stderr = std::sqrt(inflation / sxx);
    return fit;
}

}  // namespace anderson
