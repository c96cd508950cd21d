#include "anderson/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "anderson/errors.hpp"
#include "anderson/rng.hpp"

namespace anderson::transfer {

using std::numbers::pi;

double Mat2::norm() const noexcept {
    // sigma_max = (|(a+d, b-c)| + |(a-d, b+c)|) / 2
    return 0.5 * (std::hypot(a + d, b - c) + std::hypot(a - d, b + c));
}

Mat2 Mat2::rotation(double phi) noexcept {
    const double c = std::cos(phi), s = std::sin(phi);
    return {c, -s, s, c};
}

Mat2 transfer_step(double energy, int v, double lambda) noexcept {
    return {energy - lambda * v, -1.0, 1.0, 0.0};
}

// ---------------------------------------------------------------------------

void TransferProduct::push(const Mat2& g) noexcept {
    // g R(phi) = Q' [[r, b], [0, 1/r]], det g = 1.
    const double a11 = g.a * cos_ + g.b * sin_;
    const double a21 = g.c * cos_ + g.d * sin_;
    const double a12 = -g.a * sin_ + g.b * cos_;
    const double a22 = -g.c * sin_ + g.d * cos_;
    const double r = std::hypot(a11, a21);
    const double c = a11 / r, s = a21 / r;
    const double b = c * a12 + s * a22;

    shear_ += (b / r) * inv_sq_;
    log_diag_ += std::log(r);
    inv_sq_ /= r * r;
    cos_ = c;
    sin_ = s;
    ++length_;
}

Mat2 TransferProduct::matrix() const noexcept {
    const Mat2 raw{cos_, cos_ * shear_ - sin_ * inv_sq_, sin_, sin_ * shear_ + cos_ * inv_sq_};
    const double m = std::max({std::abs(raw.a), std::abs(raw.b), std::abs(raw.c), std::abs(raw.d)});
    return {raw.a / m, raw.b / m, raw.c / m, raw.d / m};
}

double TransferProduct::log_scale() const noexcept {
    const double m = std::max({std::abs(cos_), std::abs(cos_ * shear_ - sin_ * inv_sq_), std::abs(sin_),
                               std::abs(sin_ * shear_ + cos_ * inv_sq_)});
    return log_diag_ + std::log(m);
}

double TransferProduct::log_norm() const noexcept {
    // ||[[1, s], [0, q]]||^2 = (T + sqrt(T^2 - 4 q^2)) / 2, T = 1 + s^2 + q^2.
    const double q = inv_sq_, s = shear_;
    const double t = 1.0 + s * s + q * q;
    const double disc = std::sqrt(std::max(0.0, (t - 2 * q) * (t + 2 * q)));
    return log_diag_ + 0.5 * std::log(0.5 * (t + disc));
}

double TransferProduct::log_det() const noexcept {
    // det R(phi) * e^t * e^-t
    return std::log(cos_ * cos_ + sin_ * sin_);
}

std::pair<Vec2, double> TransferProduct::apply(Vec2 v) const noexcept {
    const double wx = v.x + shear_ * v.y;
    const double wy = inv_sq_ * v.y;
    const double n = std::hypot(wx, wy);
    const Vec2 dir{(cos_ * wx - sin_ * wy) / n, (sin_ * wx + cos_ * wy) / n};
    return {dir, log_diag_ + std::log(n)};
}

TransferProduct transfer_product(double energy, const model::PotentialRealization& pot, double lambda) {
    if (pot.size() == 0) throw InvalidArgument("transfer_product: empty potential");
    if (!std::isfinite(energy) || !std::isfinite(lambda))
        throw InvalidArgument("transfer_product: energy and lambda must be finite");
    TransferProduct m;
    for (std::int8_t v : pot.values) m.push(transfer_step(energy, v, lambda));
    return m;
}

// ---------------------------------------------------------------------------

ProjectiveAngle::ProjectiveAngle(double theta) noexcept {
    double t = std::fmod(theta, pi);
    if (t < 0) t += pi;
    if (t >= pi) t = 0.0;
    theta_ = t;
}

ProjectiveAngle ProjectiveAngle::of(Vec2 v) noexcept { return ProjectiveAngle(std::atan2(v.y, v.x)); }

Vec2 ProjectiveAngle::unit() const noexcept { return {std::cos(theta_), std::sin(theta_)}; }

ProjectiveAngle projective_action(const Mat2& g, ProjectiveAngle theta) {
    if (g.det() == 0.0) throw InvalidArgument("projective_action: singular matrix");
    return ProjectiveAngle::of(g * theta.unit());
}

double projective_distance(double a, double b) noexcept {
    const double d = std::fmod(std::abs(a - b), pi);
    return std::min(d, pi - d);
}

// ---------------------------------------------------------------------------

namespace {

std::size_t bin_of(double theta, std::size_t bins) {
    const auto i = static_cast<std::size_t>(theta / pi * static_cast<double>(bins));
    return std::min(i, bins - 1);
}

// Adds `m` spread uniformly over the circular arc [start, start + length),
// 0 <= start < pi, 0 <= length <= pi.
void deposit(std::vector<double>& out, double start, double length, double m) {
    const std::size_t bins = out.size();
    if (length <= 0.0) {
        out[bin_of(start, bins)] += m;
        return;
    }
    const double w = pi / static_cast<double>(bins);
    const double density = m / length;
    const double end = start + length;
    double pos = start;
    auto i = static_cast<std::size_t>(pos / w);
    while (pos < end) {
        const double seg_end = std::min(end, w * static_cast<double>(i + 1));
        if (seg_end > pos) out[i % bins] += density * (seg_end - pos);
        pos = std::max(pos, seg_end);
        ++i;
    }
}

}  // namespace

std::vector<double> pushforward(const std::vector<double>& mass, const Mat2& g, PushforwardRule rule) {
    const std::size_t bins = mass.size();
    std::vector<double> out(bins, 0.0);
    const double w = pi / static_cast<double>(bins);
    if (rule == PushforwardRule::bin_centers) {
        for (std::size_t i = 0; i < bins; ++i) {
            if (mass[i] == 0.0) continue;
            const double c = w * (static_cast<double>(i) + 0.5);
            out[bin_of(projective_action(g, ProjectiveAngle(c)).theta(), bins)] += mass[i];
        }
        return out;
    }
    const bool preserving = g.det() > 0;
    std::vector<double> image(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i)
        image[i] = projective_action(g, ProjectiveAngle(w * static_cast<double>(i))).theta();
    for (std::size_t i = 0; i < bins; ++i) {
        if (mass[i] == 0.0) continue;
        const double lo = preserving ? image[i] : image[i + 1];
        const double hi = preserving ? image[i + 1] : image[i];
        double length = hi - lo;
        if (length < 0) length += pi;
        deposit(out, lo, length, mass[i]);
    }
    return out;
}

double stationarity_residual(const std::vector<double>& mass, double energy, double lambda, PushforwardRule rule) {
    const auto plus = pushforward(mass, transfer_step(energy, 1, lambda), rule);
    const auto minus = pushforward(mass, transfer_step(energy, -1, lambda), rule);
    CompensatedSum tv;
    for (std::size_t i = 0; i < mass.size(); ++i) tv.add(std::abs(mass[i] - 0.5 * (plus[i] + minus[i])));
    return 0.5 * tv.value();
}

FurstenbergEstimate furstenberg_estimate(double energy, double lambda, const FurstenbergOptions& opts) {
    if (lambda == 0.0)
        throw DegenerateCoupling("furstenberg_estimate: degenerate (elliptic) coupling lambda = 0");
    if (opts.bins == 0 || opts.steps == 0)
        throw InvalidArgument("furstenberg_estimate: bins and steps must be positive");
    const std::size_t batches = std::clamp<std::size_t>(opts.batches, 1, opts.steps);

    const Mat2 g[2] = {transfer_step(energy, -1, lambda), transfer_step(energy, 1, lambda)};
    CounterRng rng(opts.seed);
    Vec2 u{1.0, 0.0};
    auto step = [&] {
        u = g[rng.sign() > 0 ? 1 : 0] * u;
        const double n = std::hypot(u.x, u.y);
        u.x /= n;
        u.y /= n;
    };
    for (std::size_t k = 0; k < opts.burn_in; ++k) step();

    std::vector<std::vector<std::uint64_t>> counts(batches, std::vector<std::uint64_t>(opts.bins, 0));
    const std::size_t per_batch = opts.steps / batches;
    for (std::size_t k = 0; k < opts.steps; ++k) {
        step();
        const std::size_t b = std::min(k / per_batch, batches - 1);
        ++counts[b][bin_of(ProjectiveAngle::of(u).theta(), opts.bins)];
    }

    FurstenbergEstimate est;
    est.energy = energy;
    est.lambda = lambda;
    est.steps = opts.steps;
    est.mass.assign(opts.bins, 0.0);
    est.std_error.assign(opts.bins, 0.0);
    std::vector<std::uint64_t> batch_total(batches, 0);
    for (std::size_t b = 0; b < batches; ++b)
        for (auto c : counts[b]) batch_total[b] += c;
    for (std::size_t i = 0; i < opts.bins; ++i) {
        std::uint64_t total = 0;
        std::vector<double> fractions(batches);
        for (std::size_t b = 0; b < batches; ++b) {
            total += counts[b][i];
            fractions[b] = static_cast<double>(counts[b][i]) / static_cast<double>(batch_total[b]);
        }
        est.mass[i] = static_cast<double>(total) / static_cast<double>(opts.steps);
        if (batches > 1) est.std_error[i] = sample_moments(fractions).stderr_of_mean;
    }
    est.stationarity_residual = stationarity_residual(est.mass, energy, lambda, PushforwardRule::overlap);
    est.bin_center_residual = stationarity_residual(est.mass, energy, lambda, PushforwardRule::bin_centers);
    return est;
}

double tau_max_interval(const FurstenbergEstimate& est, double eps) {
    if (!(eps > 0.0)) throw InvalidArgument("tau_max_interval: eps must be positive");
    if (eps >= pi) return 1.0;
    const std::size_t bins = est.bins();
    const double w = est.bin_width();
    std::vector<double> cum(bins + 1, 0.0);
    for (std::size_t i = 0; i < bins; ++i) cum[i + 1] = cum[i] + est.mass[i];
    const double total = cum[bins];

    // Cumulative mass from 0 to x, extended periodically.
    auto cdf = [&](double x) {
        const double wraps = std::floor(x / pi);
        const double r = x - wraps * pi;
        const double pos = r / w;
        const auto i = std::min(static_cast<std::size_t>(pos), bins - 1);
        return wraps * total + cum[i] + (pos - static_cast<double>(i)) * est.mass[i];
    };
    double best = 0.0;
    for (std::size_t i = 0; i < bins; ++i) {
        const double edge = w * static_cast<double>(i);
        best = std::max(best, cdf(edge + eps) - cdf(edge));
        const double start = edge - eps + pi;
        best = std::max(best, cdf(start + eps) - cdf(start));
    }
    return std::min(best, 1.0);
}

double mirror_distance(const FurstenbergEstimate& a, const FurstenbergEstimate& b) {
    if (a.bins() != b.bins()) throw InvalidArgument("mirror_distance: bin counts differ");
    CompensatedSum tv;
    const std::size_t n = a.bins();
    for (std::size_t i = 0; i < n; ++i) tv.add(std::abs(a.mass[i] - b.mass[n - 1 - i]));
    return 0.5 * tv.value();
}

// ---------------------------------------------------------------------------

namespace {

double log_norm_for_trial(double energy, double lambda, std::size_t n, std::uint64_t key) {
    return transfer_product(energy, model::sample_potential(n, key), lambda).log_norm();
}

}  // namespace

LyapunovEstimate lyapunov_exponent(double energy, double lambda, std::size_t n, std::size_t trials,
                                   std::uint64_t seed, const WorkerPool& pool) {
    if (n < 1) throw InvalidArgument("lyapunov_exponent: N must be at least 1");
    if (trials < 2) throw InvalidArgument("lyapunov_exponent: need at least 2 trials");
    const auto rates = pool.map<double>(trials, [&](std::size_t t) {
        return log_norm_for_trial(energy, lambda, n, seed_for_trial(seed, t)) / static_cast<double>(n);
    });
    const auto m = sample_moments(rates);
    return {m.mean, m.stderr_of_mean};
}

BinomialEstimate deviation_tail(double energy, double lambda, std::size_t n, double sigma, double lyapunov,
                                std::size_t trials, std::uint64_t seed, const WorkerPool& pool) {
    if (n < 1 || trials < 1) throw InvalidArgument("deviation_tail: N and trials must be positive");
    const auto hits = pool.map<std::uint8_t>(trials, [&](std::size_t t) -> std::uint8_t {
        const double rate =
            log_norm_for_trial(energy, lambda, n, seed_for_trial(seed, t)) / static_cast<double>(n);
        return std::abs(rate - lyapunov) > sigma;
    });
    std::size_t k = 0;
    for (auto h : hits) k += h;
    return binomial_estimate(k, trials);
}

TailDecayFit fit_tail_decay(const std::vector<std::size_t>& sizes, const std::vector<BinomialEstimate>& tails) {
    if (sizes.size() != tails.size()) throw InvalidArgument("fit_tail_decay: length mismatch");
    std::vector<double> x, y, w;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        const auto& t = tails[i];
        if (t.successes == 0 || t.successes == t.trials) continue;
        x.push_back(static_cast<double>(sizes[i]));
        y.push_back(std::log(t.probability));
        w.push_back(static_cast<double>(t.successes) / (1.0 - t.probability));
    }
    TailDecayFit fit;
    fit.cells_used = x.size();
    if (x.size() < 2) {
        fit.note = "too few exceedances to fit: " + std::to_string(x.size()) + " usable cell(s)";
        return fit;
    }
    const auto lf = weighted_linear_fit(x, y, w);
    fit.fitted = true;
    fit.rate = -lf.slope;
    fit.rate_stderr = lf.slope_stderr;
    fit.intercept = lf.intercept;
    return fit;
}

BinomialEstimate angle_concentration(const AngleConcentrationOptions& o, const WorkerPool& pool) {
    if (o.trials == 0) throw InvalidArgument("angle_concentration: trials must be positive");
    if (!(o.eps > 0.0)) return binomial_estimate(0, o.trials);
    if (o.eps < 1.0 && !(static_cast<double>(o.n) > o.log_factor * std::log(1.0 / o.eps)))
        throw PreconditionViolation("angle_concentration: need N > " + std::to_string(o.log_factor) +
                                    " * log(1/eps) = " + std::to_string(o.log_factor * std::log(1.0 / o.eps)));
    const Vec2 xi = o.start.unit();
    const Vec2 eta = o.target.unit();
    const auto hits = pool.map<std::uint8_t>(o.trials, [&](std::size_t t) -> std::uint8_t {
        const auto m = transfer_product(o.energy, model::sample_potential(o.n, seed_for_trial(o.seed, t)), o.lambda);
        const Vec2 dir = m.apply(xi).first;
        return std::abs(dir.x * eta.x + dir.y * eta.y) < o.eps;
    });
    std::size_t k = 0;
    for (auto h : hits) k += h;
    return binomial_estimate(k, o.trials);
}

BinomialEstimate uniform_norm_bound(const UniformNormOptions& o, const WorkerPool& pool) {
    if (o.trials == 0 || o.n == 0) throw InvalidArgument("uniform_norm_bound: N and trials must be positive");
    if (o.kappa < 0.0) throw InvalidArgument("uniform_norm_bound: kappa must be nonnegative");
    std::vector<double> grid;
    if (o.kappa == 0.0 || o.grid_size < 2) {
        grid.push_back(o.energy0);
    } else {
        for (std::size_t i = 0; i < o.grid_size; ++i)
            grid.push_back(o.energy0 - o.kappa +
                           2.0 * o.kappa * static_cast<double>(i) / static_cast<double>(o.grid_size - 1));
    }
    const double n = static_cast<double>(o.n);
    const double threshold = o.lyapunov * n + o.constant * std::pow(o.kappa, o.alpha) * n;
    const auto hits = pool.map<std::uint8_t>(o.trials, [&](std::size_t t) -> std::uint8_t {
        const auto pot = model::sample_potential(o.n, seed_for_trial(o.seed, t));
        double worst = -std::numeric_limits<double>::infinity();
        for (double e : grid) worst = std::max(worst, transfer_product(e, pot, o.lambda).log_norm());
        return worst > threshold;
    });
    std::size_t k = 0;
    for (auto h : hits) k += h;
    return binomial_estimate(k, o.trials);
}

}  // namespace anderson::transfer
