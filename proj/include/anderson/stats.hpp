#pragma once

// Monte Carlo estimates of spectral-window probabilities for H_N and the
// local-statistics (Poisson) pipeline.
//
// All windows are I = [E0 - delta, E0 + delta]. Sweeps over delta reuse the
// same disorder realizations in every cell (trial t always draws from stream
// seed_for_trial(seed, t)), which makes the slope fits much less noisy than
// independent cells would.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "anderson/fit.hpp"
#include "anderson/model.hpp"
#include "anderson/parallel.hpp"

namespace anderson::stats {

/// Shared parameters of a disorder-averaged window experiment.
struct WindowExperiment {
    double energy0 = 0.5;
    double lambda = 0.5;
    std::size_t n = 100;
    std::size_t trials = 1000;
    std::uint64_t seed = 0;
    /// When set, every window must lie inside [-2 + margin, 2 - margin].
    std::optional<double> band_margin;
};

/// Throws PreconditionViolation if [lo, hi] leaves the admissible band.
void require_in_band(double lo, double hi, std::optional<double> band_margin);

struct ScalingCell {
    double delta = 0.0;
    BinomialEstimate estimate;
};

/// Weighted least squares of log p against log delta, weights
/// successes / (1 - p) (inverse delta-method variance of log p). Cells with
/// zero successes are dropped and listed.
struct SlopeFit {
    bool fitted = false;
    double slope = 0.0;
    double slope_stderr = 0.0;
    double intercept = 0.0;
    std::size_t cells_used = 0;
    std::vector<double> dropped_deltas;
    std::string note;
};

SlopeFit fit_loglog_slope(const std::vector<ScalingCell>& cells);

struct ScalingExperiment {
    std::vector<ScalingCell> cells;
    SlopeFit fit;
};

// --- first-order (Wegner) --------------------------------------------------

/// P[Spec H_N meets I].
BinomialEstimate wegner_probability(const WindowExperiment& exp, double delta,
                                    const WorkerPool& pool = WorkerPool{});
ScalingExperiment wegner_sweep(const WindowExperiment& exp, const std::vector<double>& deltas,
                               const WorkerPool& pool = WorkerPool{});

// --- expected trace ---------------------------------------------------------

struct ExpectedTrace {
    double delta = 0.0;
    double mean = 0.0;        // E[#eigenvalues in I]
    double stderr_of_mean = 0.0;
    double prediction = 0.0;  // N k(E0) |I|
    double ratio = 0.0;       // mean / prediction
    double ratio_stderr = 0.0;
    double correction_scale = 0.0;  // N delta^2 + delta log^2(N + 1/delta)
};

/// Mean eigenvalue count in I compared against N k(E0) 2 delta.
/// Requires log(1/delta) < log_constant * N for delta > 0; delta == 0 is the
/// empty window and returns 0.
ExpectedTrace expected_trace(const WindowExperiment& exp, double delta, double k_at_e0,
                             double log_constant = 1.0, const WorkerPool& pool = WorkerPool{});

// --- second-order (Minami-type) ---------------------------------------------

/// P[H_N has at least two eigenvalues in I]. Requires
/// log(1/delta) < log_constant * sqrt(N) for delta > 0.
BinomialEstimate minami_probability(const WindowExperiment& exp, double delta, double log_constant = 1.0,
                                    const WorkerPool& pool = WorkerPool{});
ScalingExperiment minami_sweep(const WindowExperiment& exp, const std::vector<double>& deltas,
                               double log_constant = 1.0, const WorkerPool& pool = WorkerPool{});

// --- near resonances -----------------------------------------------------------

struct NearResonanceReport {
    bool occurred = false;
    /// Indices into `eigenvalues` of the two eigenpairs with the smallest
    /// boundary amplitude, when at least two lie in the window.
    std::optional<std::pair<std::size_t, std::size_t>> witness;
    /// Largest of the boundary amplitudes of the witness pair; +inf without one.
    double boundary_max = 0.0;
    double threshold = 0.0;  // N^-exponent
    std::vector<double> eigenvalues;  // all eigenvalues in the window
};

/// Number of sites j >= 1 with j < sqrt(N); the boundary zone is that many
/// sites at each end of the chain.
std::size_t boundary_zone_width(std::size_t n) noexcept;

/// Searches the exact eigenpairs with eigenvalue in [E0 - delta, E0 + delta]
/// for two whose amplitudes on the boundary zone are all below N^-exponent.
/// Throws InvalidArgument for N < 16.
NearResonanceReport near_resonance_event(const model::TridiagonalHamiltonian& h, double energy0, double delta,
                                         double exponent = 10.0);

ScalingExperiment near_resonance_sweep(const WindowExperiment& exp, const std::vector<double>& deltas,
                                       double exponent = 10.0, const WorkerPool& pool = WorkerPool{});

// --- local statistics ---------------------------------------------------------

struct PointProcessSample {
    std::vector<double> points;  // sorted, in [0, L]
    double length = 0.0;         // L
    double energy0 = 0.0;
    std::size_t n = 0;
    std::uint64_t seed = 0;
};

/// {N (E - E0) : E in spec} restricted to [0, L], sorted.
PointProcessSample rescale_points(const std::vector<double>& eigenvalues, std::size_t n, double energy0,
                                  double length);

/// Rescaled eigenvalues of H_N in [E0, E0 + L/N] for one disorder realization.
PointProcessSample rescaled_sample(const model::PotentialRealization& pot, double lambda, double energy0,
                                   double length, std::optional<double> band_margin = std::nullopt);

std::vector<PointProcessSample> poisson_samples(const WindowExperiment& exp, double length,
                                                const WorkerPool& pool = WorkerPool{});

/// Homogeneous Poisson samples of the given rate on [0, L], built from
/// exponential spacings.
std::vector<PointProcessSample> synthetic_poisson_samples(std::size_t trials, double rate, double length,
                                                          std::uint64_t seed);

struct PoissonTestReport {
    std::size_t samples = 0;
    // (a) counts per trial against Poisson(mean)
    double count_mean = 0.0;
    double count_variance = 0.0;
    double count_chi2 = 0.0;
    std::size_t count_dof = 0;
    double count_p = 0.0;
    std::vector<std::size_t> count_bin_lower;  // first count value of each chi-square bin
    std::vector<double> count_observed;
    std::vector<double> count_expected;
    // (b) gaps between consecutive points of trials with >= 2 points, against
    // the exponential law seen through a window of length L:
    // density proportional to (L - g) exp(-rate g) on [0, L].
    std::size_t gap_count = 0;
    double gap_rate = 0.0;
    double gap_ks = 0.0;
    double gap_p = 0.0;
    // (b') spacings of all trials laid end to end, against a plain exponential
    std::size_t pooled_count = 0;
    double pooled_ks = 0.0;
    double pooled_p = 0.0;
    // (c) counts in [0, L/2) and [L/2, L]
    double correlation = 0.0;
    double correlation_ci_low = 0.0;
    double correlation_ci_high = 0.0;
    double correlation_p = 0.0;
    // k(E0) L when a DOS value was supplied
    std::optional<double> expected_mean;

    bool passes(double level) const noexcept {
        return count_p > level && gap_p > level && correlation_p > level;
    }
};

/// Minimum number of samples accepted by poisson_tests.
inline constexpr std::size_t kMinPoissonSamples = 500;

/// Runs the count, gap and independence tests. Throws InvalidArgument for
/// fewer than kMinPoissonSamples samples or mixed window lengths.
PoissonTestReport poisson_tests(const std::vector<PointProcessSample>& samples,
                                std::optional<double> k_at_e0 = std::nullopt);

/// Asymptotic Kolmogorov p-value for statistic D on n points, with Stephens'
/// small-sample correction.
double kolmogorov_p_value(double d, std::size_t n) noexcept;

/// Upper tail of the chi-square distribution.
double chi_square_p_value(double chi2, std::size_t dof);

// --- localization windows ------------------------------------------------------

struct LocalizationPartition {
    std::size_t n = 0;
    std::size_t scale = 0;   // M, the window length
    std::size_t margin = 0;  // ceil(M / 10)
    std::vector<model::SiteInterval> windows;

    bool disjoint(std::size_t i, std::size_t j) const;
    /// Pairs (i < j) of windows with disjoint supports, hence independent
    /// restrictions.
    std::vector<std::pair<std::size_t, std::size_t>> independent_pairs() const;
};

/// Length-M windows covering [1, N] whose cores (window minus `margin` sites at
/// each end) tile [1 + margin, N - margin]. Throws InvalidArgument when M > N
/// or M == 0.
LocalizationPartition localization_partition(std::size_t n, std::size_t m);

/// Default window length for the local-statistics pipeline, (log N)^4 capped at N.
std::size_t default_partition_scale(std::size_t n) noexcept;
/// Companion scale (log N)^3 capped at N.
std::size_t default_partition_subscale(std::size_t n) noexcept;

}  // namespace anderson::stats
