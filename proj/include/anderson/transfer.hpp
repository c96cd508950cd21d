#pragma once

// Transfer matrices, Lyapunov exponents and the projective random walk.

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "anderson/fit.hpp"
#include "anderson/model.hpp"
#include "anderson/parallel.hpp"

namespace anderson::transfer {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

/// Row-major 2x2 matrix [[a, b], [c, d]].
struct Mat2 {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

    double det() const noexcept { return a * d - b * c; }
    Vec2 operator*(Vec2 v) const noexcept { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
    Mat2 operator*(const Mat2& o) const noexcept {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
    Mat2 transpose() const noexcept { return {a, c, b, d}; }
    /// Spectral norm.
    double norm() const noexcept;

    static Mat2 rotation(double phi) noexcept;
};

/// One-site transfer matrix [[E - lambda v, -1], [1, 0]]. Determinant 1.
Mat2 transfer_step(double energy, int v, double lambda) noexcept;

/// Ordered product M_n = g_n ... g_1 of unimodular 2x2 matrices.
///
/// Stored in Iwasawa form M = R(phi) [[e^t, s e^t], [0, e^-t]]: a rotation
/// times an upper-triangular factor whose diagonal entries are exact
/// reciprocals. Left-multiplying by a step re-factors g R(phi) by a 2x2 QR, so
/// all stored quantities stay O(1) while the product grows like e^{L n}, and
/// the determinant is 1 by construction rather than by cancellation.
class TransferProduct {
public:
    TransferProduct() = default;

    /// M <- g M. `g` must have determinant 1.
    void push(const Mat2& g) noexcept;

    std::size_t length() const noexcept { return length_; }

    /// Normalized representative: M = exp(log_scale()) * matrix(), with the
    /// largest entry magnitude of matrix() equal to 1.
    Mat2 matrix() const noexcept;
    double log_scale() const noexcept;

    /// log ||M||_2, without forming M.
    double log_norm() const noexcept;
    /// log |det M| computed from the stored factors; 0 up to rounding.
    double log_det() const noexcept;

    /// M v as (unit direction, log ||M v||).
    std::pair<Vec2, double> apply(Vec2 v) const noexcept;

    double rotation_cos() const noexcept { return cos_; }
    double rotation_sin() const noexcept { return sin_; }
    double log_diagonal() const noexcept { return log_diag_; }
    double shear() const noexcept { return shear_; }

private:
    double cos_ = 1.0;
    double sin_ = 0.0;
    double log_diag_ = 0.0;  // t
    double inv_sq_ = 1.0;    // e^{-2t}
    double shear_ = 0.0;     // s
    std::size_t length_ = 0;
};

/// M_n(E) for the potential on sites 1..n: product ordered j = n down to 1.
/// M_n (xi_1, xi_0) = (xi_{n+1}, xi_n) for solutions of H xi = E xi.
/// Throws InvalidArgument for an empty potential or non-finite E / lambda.
TransferProduct transfer_product(double energy, const model::PotentialRealization& pot,
                                 double lambda);

// ---------------------------------------------------------------------------
// Projective line

/// A point of P^1(R) as an angle in [0, pi): atan2(y, x) mod pi.
class ProjectiveAngle {
public:
    ProjectiveAngle() = default;
    explicit ProjectiveAngle(double theta) noexcept;
    static ProjectiveAngle of(Vec2 v) noexcept;

    double theta() const noexcept { return theta_; }
    Vec2 unit() const noexcept;
    /// The orthogonal direction, theta + pi/2 mod pi.
    ProjectiveAngle perpendicular() const noexcept { return ProjectiveAngle(theta_ + std::numbers::pi / 2); }

private:
    double theta_ = 0.0;
};

/// Projective action tau_g(theta): the angle of g (cos theta, sin theta).
/// Throws InvalidArgument if det g == 0.
ProjectiveAngle projective_action(const Mat2& g, ProjectiveAngle theta);

/// Distance on the projective circle R / pi Z.
double projective_distance(double a, double b) noexcept;

// ---------------------------------------------------------------------------
// Furstenberg measure

struct FurstenbergOptions {
    std::size_t bins = 512;
    std::size_t burn_in = 1000;
    std::size_t steps = 1'000'000;
    std::size_t batches = 20;  // for per-bin batch-means standard errors
    std::uint64_t seed = 0;
};

/// Occupation histogram of the projective walk theta_{k+1} = tau_{g+-}(theta_k)
/// over a uniform partition of [0, pi).
struct FurstenbergEstimate {
    std::vector<double> mass;    // sums to 1
    std::vector<double> std_error;  // batch-means standard error per bin
    double stationarity_residual = 0.0;  // overlap rule
    double bin_center_residual = 0.0;    // same distance with the bin-center rule
    double energy = 0.0;
    double lambda = 0.0;
    std::size_t steps = 0;

    std::size_t bins() const noexcept { return mass.size(); }
    double bin_width() const noexcept { return std::numbers::pi / static_cast<double>(mass.size()); }
    double bin_edge(std::size_t i) const noexcept { return bin_width() * static_cast<double>(i); }
    double bin_center(std::size_t i) const noexcept { return bin_width() * (static_cast<double>(i) + 0.5); }
};

/// Single-orbit estimate of the stationary measure of mu = (delta_{g+} + delta_{g-}) / 2.
/// Throws DegenerateCoupling for lambda == 0 and InvalidArgument for zero bins or steps.
FurstenbergEstimate furstenberg_estimate(double energy, double lambda, const FurstenbergOptions& opts);

/// How a histogram is transported by tau_g. overlap spreads each bin's mass
/// uniformly over the image arc and re-bins by overlap length. bin_centers
/// moves the whole mass to the bin holding the image of the bin center; where
/// tau_g stretches or compresses, that aliases into an O(1) total-variation
/// error, so it is kept only for comparison.
enum class PushforwardRule { overlap, bin_centers };

std::vector<double> pushforward(const std::vector<double>& mass, const Mat2& g,
                                PushforwardRule rule = PushforwardRule::overlap);

/// Total-variation distance between `mass` and (tau_{g+}* mass + tau_{g-}* mass) / 2.
double stationarity_residual(const std::vector<double>& mass, double energy, double lambda,
                             PushforwardRule rule = PushforwardRule::overlap);

/// Largest mass of any circular window of width eps (mass treated as uniform
/// within a bin). Returns 1 for eps >= pi; throws InvalidArgument for eps <= 0.
double tau_max_interval(const FurstenbergEstimate& est, double eps);

/// Total-variation distance between an estimate and the mirror image
/// (theta -> pi - theta) of another.
double mirror_distance(const FurstenbergEstimate& a, const FurstenbergEstimate& b);

// ---------------------------------------------------------------------------
// Monte Carlo over disorder

struct LyapunovEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

/// Mean over trials of (1/N) log ||M_N(E)||. Trial t uses potential stream
/// seed_for_trial(seed, t). Throws InvalidArgument unless N >= 1 and trials >= 2.
LyapunovEstimate lyapunov_exponent(double energy, double lambda, std::size_t n, std::size_t trials,
                                   std::uint64_t seed, const WorkerPool& pool = WorkerPool{});

/// P[ |(1/N) log ||M_N|| - L| > sigma ] with L supplied by the caller.
BinomialEstimate deviation_tail(double energy, double lambda, std::size_t n, double sigma,
                                double lyapunov, std::size_t trials, std::uint64_t seed,
                                const WorkerPool& pool = WorkerPool{});

/// Fit of log p = a - rate * N over the cells with at least one exceedance.
struct TailDecayFit {
    bool fitted = false;
    double rate = 0.0;  // sigma', positive for a decaying tail
    double rate_stderr = 0.0;
    double intercept = 0.0;
    std::size_t cells_used = 0;
    std::string note;
};

TailDecayFit fit_tail_decay(const std::vector<std::size_t>& sizes,
                            const std::vector<BinomialEstimate>& tails);

struct AngleConcentrationOptions {
    double energy = 0.5;
    double lambda = 0.5;
    double eps = 0.05;
    std::size_t n = 500;
    std::size_t trials = 10'000;
    std::uint64_t seed = 0;
    ProjectiveAngle start{0.0};   // xi
    ProjectiveAngle target{0.0};  // eta
    /// Precondition N > log_factor * log(1/eps); the constant is unspecified
    /// in the theory, so it is a knob.
    double log_factor = 10.0;
};

/// Fraction of trials with |<M_N xi, eta>| < eps ||M_N xi||.
/// Throws PreconditionViolation when N <= log_factor * log(1/eps).
BinomialEstimate angle_concentration(const AngleConcentrationOptions& opts,
                                     const WorkerPool& pool = WorkerPool{});

struct UniformNormOptions {
    double energy0 = 0.5;
    double lambda = 0.5;
    double kappa = 0.05;
    double alpha = 0.5;
    double constant = 1.0;  // c in L N + c kappa^alpha N
    double lyapunov = 0.0;  // L(E0)
    std::size_t n = 200;
    std::size_t grid_size = 21;
    std::size_t trials = 1000;
    std::uint64_t seed = 0;
};

/// Fraction of trials in which max over an energy grid on [E0 - kappa, E0 + kappa]
/// of log ||M_N(E)|| exceeds L N + c kappa^alpha N. With kappa == 0 the grid
/// collapses to E0.
BinomialEstimate uniform_norm_bound(const UniformNormOptions& opts,
                                    const WorkerPool& pool = WorkerPool{});

}  // namespace anderson::transfer
