#include "anderson/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "anderson/errors.hpp"
#include "anderson/rng.hpp"
#include "anderson/spectrum.hpp"

namespace anderson::stats {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

model::TridiagonalHamiltonian trial_hamiltonian(const WindowExperiment& exp, std::size_t trial) {
    const auto pot = model::sample_potential(exp.n, seed_for_trial(exp.seed, trial));
    return model::build_hamiltonian(pot, exp.lambda);
}

void require_common(const WindowExperiment& exp) {
    if (exp.n == 0) throw InvalidArgument("N must be at least 1");
    if (exp.trials == 0) throw InvalidArgument("trials must be at least 1");
    if (!std::isfinite(exp.lambda) || !std::isfinite(exp.energy0))
        throw InvalidArgument("lambda and E0 must be finite");
}

void require_deltas(const std::vector<double>& deltas) {
    if (deltas.empty()) throw InvalidArgument("delta grid is empty");
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (!(deltas[i] >= 0.0) || !std::isfinite(deltas[i]))
            throw InvalidArgument("delta values must be finite and nonnegative");
        if (i > 0 && !(deltas[i] > deltas[i - 1]))
            throw InvalidArgument("delta grid must be strictly increasing");
    }
}

void require_log_condition(double delta, double bound, const char* what) {
    if (delta > 0.0 && !(std::log(1.0 / delta) < bound))
        throw PreconditionViolation(std::string(what) + ": log(1/delta) = " + std::to_string(std::log(1.0 / delta)) +
                                    " is not below " + std::to_string(bound));
}

// Eigenvalue counts in [E0 - delta, E0 + delta] for each delta, from one
// Sturm sweep at all window edges.
std::vector<std::uint32_t> window_counts(const model::TridiagonalHamiltonian& h, double e0,
                                         const std::vector<double>& deltas) {
    std::vector<double> edges;
    edges.reserve(2 * deltas.size());
    for (double d : deltas) {
        edges.push_back(e0 - d);
        // closed upper edge: count eigenvalues <= E0 + delta
        edges.push_back(std::nextafter(e0 + d, kInf));
    }
    const auto below = spectrum::sturm_counts(h, edges);
    std::vector<std::uint32_t> out(deltas.size());
    for (std::size_t i = 0; i < deltas.size(); ++i)
        out[i] = deltas[i] > 0.0 ? below[2 * i + 1] - below[2 * i] : 0;
    return out;
}

// counts[t][i] for trial t and delta i.
std::vector<std::vector<std::uint32_t>> sweep_counts(const WindowExperiment& exp, const std::vector<double>& deltas,
                                                     const WorkerPool& pool) {
    return pool.map<std::vector<std::uint32_t>>(exp.trials, [&](std::size_t t) {
        return window_counts(trial_hamiltonian(exp, t), exp.energy0, deltas);
    });
}

ScalingExperiment threshold_sweep(const WindowExperiment& exp, const std::vector<double>& deltas,
                                  std::uint32_t at_least, const WorkerPool& pool) {
    const auto counts = sweep_counts(exp, deltas, pool);
    ScalingExperiment out;
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        std::size_t hits = 0;
        for (const auto& c : counts) hits += c[i] >= at_least;
        out.cells.push_back({deltas[i], binomial_estimate(hits, exp.trials)});
    }
    out.fit = fit_loglog_slope(out.cells);
    return out;
}

double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace

void require_in_band(double lo, double hi, std::optional<double> band_margin) {
    if (!band_margin) return;
    const double m = *band_margin;
    if (lo < -2.0 + m || hi > 2.0 - m)
        throw PreconditionViolation("window [" + std::to_string(lo) + ", " + std::to_string(hi) +
                                    "] leaves the band [-2 + " + std::to_string(m) + ", 2 - " + std::to_string(m) +
                                    "]");
}

SlopeFit fit_loglog_slope(const std::vector<ScalingCell>& cells) {
    SlopeFit fit;
    std::vector<double> x, y, w;
    for (const auto& c : cells) {
        const auto& e = c.estimate;
        if (e.successes == 0 || !(c.delta > 0.0)) {
            fit.dropped_deltas.push_back(c.delta);
            continue;
        }
        const double n = static_cast<double>(e.trials);
        const double q = std::max(1.0 - e.probability, 1.0 / n);
        x.push_back(std::log(c.delta));
        y.push_back(std::log(e.probability));
        w.push_back(static_cast<double>(e.successes) / q);
    }
    fit.cells_used = x.size();
    if (x.size() < 2) {
        fit.note = "fewer than two cells with successes";
        return fit;
    }
    const auto lf = weighted_linear_fit(x, y, w);
    fit.fitted = true;
    fit.slope = lf.slope;
    fit.slope_stderr = lf.slope_stderr;
    fit.intercept = lf.intercept;
    if (!fit.dropped_deltas.empty()) fit.note = "cells with zero successes dropped";
    return fit;
}

// ---------------------------------------------------------------------------

BinomialEstimate wegner_probability(const WindowExperiment& exp, double delta, const WorkerPool& pool) {
    require_common(exp);
    if (!(delta >= 0.0)) throw InvalidArgument("delta must be nonnegative");
    require_in_band(exp.energy0 - delta, exp.energy0 + delta, exp.band_margin);
    const auto counts = sweep_counts(exp, {delta}, pool);
    std::size_t hits = 0;
    for (const auto& c : counts) hits += c[0] >= 1;
    return binomial_estimate(hits, exp.trials);
}

ScalingExperiment wegner_sweep(const WindowExperiment& exp, const std::vector<double>& deltas,
                               const WorkerPool& pool) {
    require_common(exp);
    require_deltas(deltas);
    require_in_band(exp.energy0 - deltas.back(), exp.energy0 + deltas.back(), exp.band_margin);
    return threshold_sweep(exp, deltas, 1, pool);
}

ExpectedTrace expected_trace(const WindowExperiment& exp, double delta, double k_at_e0, double log_constant,
                             const WorkerPool& pool) {
    require_common(exp);
    if (!(delta >= 0.0)) throw InvalidArgument("delta must be nonnegative");
    if (!(k_at_e0 > 0.0)) throw InvalidArgument("k(E0) must be positive");
    require_in_band(exp.energy0 - delta, exp.energy0 + delta, exp.band_margin);
    require_log_condition(delta, log_constant * static_cast<double>(exp.n), "expected trace");

    ExpectedTrace out;
    out.delta = delta;
    const double n = static_cast<double>(exp.n);
    out.prediction = n * k_at_e0 * 2.0 * delta;
    if (delta == 0.0) return out;

    const auto counts = sweep_counts(exp, {delta}, pool);
    std::vector<double> xs(counts.size());
    for (std::size_t t = 0; t < counts.size(); ++t) xs[t] = counts[t][0];
    const auto m = sample_moments(xs);
    out.mean = m.mean;
    out.stderr_of_mean = m.stderr_of_mean;
    out.ratio = out.mean / out.prediction;
    out.ratio_stderr = out.stderr_of_mean / out.prediction;
    const double lg = std::log(n + 1.0 / delta);
    out.correction_scale = n * delta * delta + delta * lg * lg;
    return out;
}

BinomialEstimate minami_probability(const WindowExperiment& exp, double delta, double log_constant,
                                    const WorkerPool& pool) {
    require_common(exp);
    if (!(delta >= 0.0)) throw InvalidArgument("delta must be nonnegative");
    require_in_band(exp.energy0 - delta, exp.energy0 + delta, exp.band_margin);
    require_log_condition(delta, log_constant * std::sqrt(static_cast<double>(exp.n)), "two-eigenvalue estimate");
    const auto counts = sweep_counts(exp, {delta}, pool);
    std::size_t hits = 0;
    for (const auto& c : counts) hits += c[0] >= 2;
    return binomial_estimate(hits, exp.trials);
}

ScalingExperiment minami_sweep(const WindowExperiment& exp, const std::vector<double>& deltas, double log_constant,
                               const WorkerPool& pool) {
    require_common(exp);
    require_deltas(deltas);
    require_in_band(exp.energy0 - deltas.back(), exp.energy0 + deltas.back(), exp.band_margin);
    require_log_condition(deltas.front(), log_constant * std::sqrt(static_cast<double>(exp.n)),
                          "two-eigenvalue estimate");
    return threshold_sweep(exp, deltas, 2, pool);
}

// ---------------------------------------------------------------------------

std::size_t boundary_zone_width(std::size_t n) noexcept {
    std::size_t w = 0;
    while ((w + 1) * (w + 1) < n) ++w;
    return w;
}

namespace {

double boundary_amplitude(const std::vector<double>& vec, std::size_t width) {
    const std::size_t n = vec.size();
    double m = 0.0;
    for (std::size_t j = 0; j < width && j < n; ++j) {
        m = std::max(m, std::abs(vec[j]));
        m = std::max(m, std::abs(vec[n - 1 - j]));
    }
    return m;
}

// Evaluates the event for the eigenpairs of `window` lying within delta of E0.
NearResonanceReport resonance_from_window(const spectrum::SpectralWindowResult& window,
                                          const std::vector<double>& amplitudes, double e0, double delta,
                                          double threshold) {
    NearResonanceReport r;
    r.threshold = threshold;
    r.boundary_max = kInf;
    if (delta == 0.0) return r;
    for (double e : window.eigenvalues)
        if (e >= e0 - delta && e <= e0 + delta) r.eigenvalues.push_back(e);
    if (r.eigenvalues.size() < 2) return r;
    // positions of the window eigenpairs inside the full list
    std::size_t offset = 0;
    while (window.eigenvalues[offset] < e0 - delta) ++offset;
    std::vector<std::size_t> order(r.eigenvalues.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return amplitudes[offset + a] < amplitudes[offset + b];
    });
    const std::size_t a = std::min(order[0], order[1]);
    const std::size_t b = std::max(order[0], order[1]);
    r.witness = std::make_pair(a, b);
    r.boundary_max = std::max(amplitudes[offset + a], amplitudes[offset + b]);
    r.occurred = r.boundary_max < threshold;
    return r;
}

}  // namespace

NearResonanceReport near_resonance_event(const model::TridiagonalHamiltonian& h, double energy0, double delta,
                                         double exponent) {
    const std::size_t n = h.size();
    if (n < 16) throw InvalidArgument("near-resonance event needs N >= 16");
    if (!(delta >= 0.0)) throw InvalidArgument("delta must be nonnegative");
    const double threshold = std::pow(static_cast<double>(n), -exponent);
    if (delta == 0.0) {
        NearResonanceReport r;
        r.threshold = threshold;
        r.boundary_max = kInf;
        return r;
    }
    const auto window = spectrum::eigen_window(h, energy0 - delta, std::nextafter(energy0 + delta, kInf), true);
    const std::size_t width = boundary_zone_width(n);
    std::vector<double> amps;
    for (const auto& v : window.eigenvectors) amps.push_back(boundary_amplitude(v, width));
    return resonance_from_window(window, amps, energy0, delta, threshold);
}

ScalingExperiment near_resonance_sweep(const WindowExperiment& exp, const std::vector<double>& deltas,
                                       double exponent, const WorkerPool& pool) {
    require_common(exp);
    require_deltas(deltas);
    if (exp.n < 16) throw InvalidArgument("near-resonance event needs N >= 16");
    require_in_band(exp.energy0 - deltas.back(), exp.energy0 + deltas.back(), exp.band_margin);
    const double threshold = std::pow(static_cast<double>(exp.n), -exponent);
    const std::size_t width = boundary_zone_width(exp.n);
    const double widest = deltas.back();

    const auto hits = pool.map<std::vector<char>>(exp.trials, [&](std::size_t t) {
        std::vector<char> out(deltas.size(), 0);
        const auto h = trial_hamiltonian(exp, t);
        // Cheap prefilter: the event needs two eigenvalues in the widest window.
        if (window_counts(h, exp.energy0, {widest})[0] < 2) return out;
        const auto window =
            spectrum::eigen_window(h, exp.energy0 - widest, std::nextafter(exp.energy0 + widest, kInf), true);
        std::vector<double> amps;
        for (const auto& v : window.eigenvectors) amps.push_back(boundary_amplitude(v, width));
        for (std::size_t i = 0; i < deltas.size(); ++i)
            out[i] = resonance_from_window(window, amps, exp.energy0, deltas[i], threshold).occurred;
        return out;
    });

    ScalingExperiment out;
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        std::size_t k = 0;
        for (const auto& h : hits) k += h[i] != 0;
        out.cells.push_back({deltas[i], binomial_estimate(k, exp.trials)});
    }
    out.fit = fit_loglog_slope(out.cells);
    return out;
}

// ---------------------------------------------------------------------------

PointProcessSample rescale_points(const std::vector<double>& eigenvalues, std::size_t n, double energy0,
                                  double length) {
    PointProcessSample s;
    s.length = length;
    s.energy0 = energy0;
    s.n = n;
    const double scale = static_cast<double>(n);
    for (double e : eigenvalues) {
        const double x = scale * (e - energy0);
        if (x >= 0.0 && x <= length) s.points.push_back(x);
    }
    std::sort(s.points.begin(), s.points.end());
    return s;
}

PointProcessSample rescaled_sample(const model::PotentialRealization& pot, double lambda, double energy0,
                                   double length, std::optional<double> band_margin) {
    if (!(length > 0.0)) throw InvalidArgument("L must be positive");
    const std::size_t n = pot.size();
    const double upper = energy0 + length / static_cast<double>(n);
    require_in_band(energy0, upper, band_margin);
    const auto h = model::build_hamiltonian(pot, lambda);
    const auto w = spectrum::eigen_window(h, energy0, std::nextafter(upper, kInf), false);
    auto s = rescale_points(w.eigenvalues, n, energy0, length);
    s.seed = pot.seed;
    return s;
}

std::vector<PointProcessSample> poisson_samples(const WindowExperiment& exp, double length, const WorkerPool& pool) {
    require_common(exp);
    if (!(length > 0.0)) throw InvalidArgument("L must be positive");
    require_in_band(exp.energy0, exp.energy0 + length / static_cast<double>(exp.n), exp.band_margin);
    return pool.map<PointProcessSample>(exp.trials, [&](std::size_t t) {
        const auto pot = model::sample_potential(exp.n, seed_for_trial(exp.seed, t));
        return rescaled_sample(pot, exp.lambda, exp.energy0, length);
    });
}

std::vector<PointProcessSample> synthetic_poisson_samples(std::size_t trials, double rate, double length,
                                                          std::uint64_t seed) {
    if (!(rate > 0.0) || !(length > 0.0)) throw InvalidArgument("rate and L must be positive");
    std::vector<PointProcessSample> out(trials);
    for (std::size_t t = 0; t < trials; ++t) {
        auto& s = out[t];
        s.length = length;
        s.seed = seed_for_trial(seed, t);
        CounterRng rng(s.seed);
        double x = 0.0;
        for (;;) {
            x += -std::log1p(-rng.uniform()) / rate;
            if (x > length) break;
            s.points.push_back(x);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

double kolmogorov_p_value(double d, std::size_t n) noexcept {
    if (n == 0) return 1.0;
    const double sn = std::sqrt(static_cast<double>(n));
    const double lam = (sn + 0.12 + 0.11 / sn) * d;
    if (lam < 0.2) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lam * lam);
        sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
        if (term < 1e-16) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

double chi_square_p_value(double chi2, std::size_t dof) {
    if (dof == 0) throw InvalidArgument("chi-square test with zero degrees of freedom");
    if (!(chi2 > 0.0)) return 1.0;
    return boost::math::gamma_q(0.5 * static_cast<double>(dof), 0.5 * chi2);
}

namespace {

// Gap law seen through a window of length L for a Poisson process of rate
// rho, in units u = g / L and x = rho L: density proportional to
// (1 - u) exp(-x u) on [0, 1].
double truncated_gap_mean(double x) {
    const double e = std::exp(-x);
    const double i0 = (x - 1.0 + e) / (x * x);
    const double m1 = (1.0 - e * (1.0 + x)) / (x * x);
    const double m2 = (2.0 - e * (x * x + 2.0 * x + 2.0)) / (x * x * x);
    return (m1 - m2) / i0;
}

double truncated_gap_cdf(double u, double x) {
    const double b0 = 1.0 - x;
    const double bu = std::exp(-x * u) * (x * (u - 1.0) + 1.0);
    const double denom = x + std::expm1(-x);  // e^-x - 1 + x
    return std::clamp((bu - b0) / denom, 0.0, 1.0);
}

// x = rho L matching the mean of u, by bisection on the decreasing mean.
double fit_truncated_rate(double mean_u) {
    double lo = 1e-3, hi = 1e4;
    if (mean_u >= truncated_gap_mean(lo)) return lo;
    if (mean_u <= truncated_gap_mean(hi)) return hi;
    for (int i = 0; i < 200; ++i) {
        const double mid = std::sqrt(lo * hi);
        if (truncated_gap_mean(mid) > mean_u)
            lo = mid;
        else
            hi = mid;
    }
    return std::sqrt(lo * hi);
}

template <class Cdf>
double ks_statistic(std::vector<double> xs, Cdf cdf) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

double poisson_pmf(std::size_t k, double mean) {
    return std::exp(static_cast<double>(k) * std::log(mean) - mean - std::lgamma(static_cast<double>(k) + 1.0));
}

}  // namespace

PoissonTestReport poisson_tests(const std::vector<PointProcessSample>& samples, std::optional<double> k_at_e0) {
    if (samples.size() < kMinPoissonSamples)
        throw InvalidArgument("Poisson tests need at least " + std::to_string(kMinPoissonSamples) + " samples, got " +
                              std::to_string(samples.size()));
    const double length = samples.front().length;
    if (!(length > 0.0)) throw InvalidArgument("sample window length must be positive");
    for (const auto& s : samples)
        if (s.length != length) throw InvalidArgument("samples have different window lengths");

    PoissonTestReport r;
    r.samples = samples.size();
    const double t = static_cast<double>(samples.size());
    if (k_at_e0) r.expected_mean = *k_at_e0 * length;

    // (a) counts
    std::size_t max_count = 0;
    double sum = 0.0;
    for (const auto& s : samples) {
        sum += static_cast<double>(s.points.size());
        max_count = std::max(max_count, s.points.size());
    }
    r.count_mean = sum / t;
    double ss = 0.0;
    for (const auto& s : samples) {
        const double d = static_cast<double>(s.points.size()) - r.count_mean;
        ss += d * d;
    }
    r.count_variance = ss / (t - 1.0);

    std::vector<double> observed(max_count + 1, 0.0);
    for (const auto& s : samples) observed[s.points.size()] += 1.0;

    if (r.count_mean > 0.0) {
        // Bins [lower_i, lower_{i+1}); the last one is open-ended. Each bin
        // holds an expected count of at least 5.
        const double mean = r.count_mean;
        double tail = t;  // expected mass at k >= current
        double acc_e = 0.0, acc_o = 0.0;
        std::size_t lower = 0;
        for (std::size_t k = 0;; ++k) {
            const double e = t * poisson_pmf(k, mean);
            acc_e += e;
            acc_o += k < observed.size() ? observed[k] : 0.0;
            tail -= e;
            if (acc_e >= 5.0 && tail >= 5.0) {
                r.count_bin_lower.push_back(lower);
                r.count_expected.push_back(acc_e);
                r.count_observed.push_back(acc_o);
                acc_e = acc_o = 0.0;
                lower = k + 1;
            }
            if (tail < 5.0 && k + 1 >= observed.size()) break;
        }
        // open-ended remainder
        double rest_o = 0.0;
        for (std::size_t k = lower; k < observed.size(); ++k) rest_o += observed[k];
        double rest_e = t;
        for (double e : r.count_expected) rest_e -= e;
        if (r.count_expected.empty()) {
            r.count_bin_lower.push_back(lower);
            r.count_expected.push_back(rest_e);
            r.count_observed.push_back(rest_o);
        } else if (rest_e < 5.0) {
            r.count_expected.back() += rest_e;
            r.count_observed.back() += rest_o;
        } else {
            r.count_bin_lower.push_back(lower);
            r.count_expected.push_back(rest_e);
            r.count_observed.push_back(rest_o);
        }
        for (std::size_t i = 0; i < r.count_expected.size(); ++i) {
            const double d = r.count_observed[i] - r.count_expected[i];
            r.count_chi2 += d * d / r.count_expected[i];
        }
    }
    const std::size_t bins = r.count_expected.size();
    if (bins >= 3) {
        r.count_dof = bins - 2;
        r.count_p = chi_square_p_value(r.count_chi2, r.count_dof);
    } else {
        // Too little spread to test; a degenerate count law is not Poisson
        // unless the mean is ~0.
        r.count_dof = 0;
        r.count_p = r.count_variance > 0.0 ? 1.0 : 0.0;
    }

    // (b) gaps within windows
    std::vector<double> gaps;
    for (const auto& s : samples)
        for (std::size_t i = 1; i < s.points.size(); ++i) gaps.push_back(s.points[i] - s.points[i - 1]);
    r.gap_count = gaps.size();
    if (gaps.size() >= 2) {
        double gsum = 0.0;
        for (double g : gaps) gsum += g;
        const double mean_u = gsum / static_cast<double>(gaps.size()) / length;
        const double x = fit_truncated_rate(mean_u);
        r.gap_rate = x / length;
        r.gap_ks = ks_statistic(gaps, [&](double g) { return truncated_gap_cdf(g / length, x); });
        r.gap_p = kolmogorov_p_value(r.gap_ks, gaps.size());
    }

    // (b') spacings of the concatenated windows
    std::vector<double> spacings;
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double base = static_cast<double>(i) * length;
        for (double p : samples[i].points) {
            if (!std::isnan(prev)) spacings.push_back(base + p - prev);
            prev = base + p;
        }
    }
    r.pooled_count = spacings.size();
    if (spacings.size() >= 2) {
        double s = 0.0;
        for (double g : spacings) s += g;
        const double rate = static_cast<double>(spacings.size()) / s;
        r.pooled_ks = ks_statistic(spacings, [&](double g) { return -std::expm1(-rate * g); });
        r.pooled_p = kolmogorov_p_value(r.pooled_ks, spacings.size());
    }

    // (c) half-window count correlation with a Fisher-z interval
    std::vector<double> left(samples.size()), right(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        for (double p : samples[i].points) (p < 0.5 * length ? left[i] : right[i]) += 1.0;
    }
    const double ml = std::accumulate(left.begin(), left.end(), 0.0) / t;
    const double mr = std::accumulate(right.begin(), right.end(), 0.0) / t;
    double sll = 0.0, srr = 0.0, slr = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        sll += (left[i] - ml) * (left[i] - ml);
        srr += (right[i] - mr) * (right[i] - mr);
        slr += (left[i] - ml) * (right[i] - mr);
    }
    const double se = 1.0 / std::sqrt(t - 3.0);
    if (sll > 0.0 && srr > 0.0) {
        r.correlation = slr / std::sqrt(sll * srr);
        const double z = std::atanh(std::clamp(r.correlation, -0.999999999999, 0.999999999999));
        r.correlation_ci_low = std::tanh(z - 1.959963984540054 * se);
        r.correlation_ci_high = std::tanh(z + 1.959963984540054 * se);
        r.correlation_p = 2.0 * normal_upper_tail(std::abs(z) / se);
    } else {
        // a constant half-count carries no correlation information
        r.correlation = 0.0;
        r.correlation_ci_low = -1.0;
        r.correlation_ci_high = 1.0;
        r.correlation_p = 1.0;
    }
    return r;
}

// ---------------------------------------------------------------------------

bool LocalizationPartition::disjoint(std::size_t i, std::size_t j) const {
    const auto& a = windows.at(i);
    const auto& b = windows.at(j);
    return a.last < b.first || b.last < a.first;
}

std::vector<std::pair<std::size_t, std::size_t>> LocalizationPartition::independent_pairs() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < windows.size(); ++i)
        for (std::size_t j = i + 1; j < windows.size(); ++j)
            if (disjoint(i, j)) out.emplace_back(i, j);
    return out;
}

LocalizationPartition localization_partition(std::size_t n, std::size_t m) {
    if (m == 0) throw InvalidArgument("window length M must be positive");
    if (m > n) throw InvalidArgument("window length M exceeds N");
    LocalizationPartition p;
    p.n = n;
    p.scale = m;
    p.margin = (m + 9) / 10;
    const std::size_t stride = m > 2 * p.margin ? m - 2 * p.margin : 1;
    for (std::size_t first = 1;; first += stride) {
        const std::size_t start = std::min(first, n - m + 1);
        p.windows.push_back({start, start + m - 1});
        if (start + m - 1 >= n) break;
    }
    return p;
}

std::size_t default_partition_scale(std::size_t n) noexcept {
    if (n < 2) return n;
    const double l = std::log(static_cast<double>(n));
    return std::min(n, static_cast<std::size_t>(std::ceil(l * l * l * l)));
}

std::size_t default_partition_subscale(std::size_t n) noexcept {
    if (n < 2) return n;
    const double l = std::log(static_cast<double>(n));
    return std::min(n, static_cast<std::size_t>(std::ceil(l * l * l)));
}

}  // namespace anderson::stats
