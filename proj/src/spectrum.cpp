#include "anderson/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "anderson/errors.hpp"
#include "anderson/rng.hpp"

namespace anderson::spectrum {

namespace {

double pivot_floor(const TridiagonalHamiltonian& h) noexcept {
    return 1e-300 * std::max(1.0, h.norm_bound());
}

}  // namespace

std::size_t sturm_count(const TridiagonalHamiltonian& h, double energy) {
    const auto d = h.diagonal();
    const double pivmin = pivot_floor(h);
    std::size_t count = 0;
    double q = 1.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        q = i == 0 ? d[0] - energy : d[i] - energy - 1.0 / q;
        if (std::abs(q) < pivmin) q = -pivmin;
        count += q < 0.0;
    }
    return count;
}

std::vector<std::uint32_t> sturm_counts(const TridiagonalHamiltonian& h, std::span<const double> energies) {
    const auto d = h.diagonal();
    const double pivmin = pivot_floor(h);
    const std::size_t m = energies.size();
    std::vector<double> q(m);
    std::vector<std::uint32_t> count(m);
    for (std::size_t e = 0; e < m; ++e) {
        double qe = d[0] - energies[e];
        qe = std::abs(qe) < pivmin ? -pivmin : qe;
        q[e] = qe;
        count[e] = qe < 0.0;
    }
    for (std::size_t i = 1; i < d.size(); ++i) {
        const double di = d[i];
        for (std::size_t e = 0; e < m; ++e) {
            double qe = di - energies[e] - 1.0 / q[e];
            qe = std::abs(qe) < pivmin ? -pivmin : qe;
            q[e] = qe;
            count[e] += qe < 0.0;
        }
    }
    return count;
}

double bisection_tolerance(const TridiagonalHamiltonian& h) noexcept {
    return 1e-12 * std::max(1.0, h.norm_bound());
}

double residual_norm(const TridiagonalHamiltonian& h, double energy, std::span<const double> x) {
    const auto hx = h.apply(x);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = hx[i] - energy * x[i];
        s += r * r;
    }
    return std::sqrt(s);
}

TridiagonalHamiltonian restrict(const TridiagonalHamiltonian& h, SiteInterval sub) { return h.restrict(sub); }

// ---------------------------------------------------------------------------

namespace {

// LU factorization with partial pivoting of the tridiagonal H - shift
// (row interchanges as in LAPACK dgttrf), with tiny pivots perturbed.
class ShiftedTridiagonalLu {
public:
    ShiftedTridiagonalLu(const TridiagonalHamiltonian& h, double shift)
        : n_(h.size()), dl_(n_ ? n_ - 1 : 0, 1.0), d_(n_), du_(n_ ? n_ - 1 : 0, 1.0),
          du2_(n_ > 2 ? n_ - 2 : 0, 0.0), swapped_(n_ ? n_ - 1 : 0, false) {
        const auto diag = h.diagonal();
        for (std::size_t i = 0; i < n_; ++i) d_[i] = diag[i] - shift;
        for (std::size_t i = 0; i + 1 < n_; ++i) {
            if (std::abs(d_[i]) >= std::abs(dl_[i])) {
                if (d_[i] != 0.0) {
                    const double fact = dl_[i] / d_[i];
                    dl_[i] = fact;
                    d_[i + 1] -= fact * du_[i];
                }
            } else {
                const double fact = d_[i] / dl_[i];
                d_[i] = dl_[i];
                dl_[i] = fact;
                const double temp = du_[i];
                du_[i] = d_[i + 1];
                d_[i + 1] = temp - fact * d_[i + 1];
                if (i + 2 < n_) {
                    du2_[i] = du_[i + 1];
                    du_[i + 1] = -fact * du_[i + 1];
                }
                swapped_[i] = true;
            }
        }
        const double tiny = std::numeric_limits<double>::epsilon() * std::max(1.0, h.norm_bound());
        for (auto& p : d_)
            if (std::abs(p) < tiny) p = p < 0 ? -tiny : tiny;
    }

    void solve(std::vector<double>& b) const {
        for (std::size_t i = 0; i + 1 < n_; ++i) {
            if (!swapped_[i]) {
                b[i + 1] -= dl_[i] * b[i];
            } else {
                const double temp = b[i] - dl_[i] * b[i + 1];
                b[i] = b[i + 1];
                b[i + 1] = temp;
            }
        }
        b[n_ - 1] /= d_[n_ - 1];
        if (n_ > 1) b[n_ - 2] = (b[n_ - 2] - du_[n_ - 2] * b[n_ - 1]) / d_[n_ - 2];
        if (n_ >= 3)
            for (std::size_t k = n_ - 2; k-- > 0;)
                b[k] = (b[k] - du_[k] * b[k + 1] - du2_[k] * b[k + 2]) / d_[k];
    }

private:
    std::size_t n_;
    std::vector<double> dl_, d_, du_, du2_;
    std::vector<bool> swapped_;
};

double normalize(std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    const double n = std::sqrt(s);
    if (n > 0.0 && std::isfinite(n))
        for (auto& v : x) v /= n;
    return n;
}

void orthogonalize(std::vector<double>& x, const std::vector<const std::vector<double>*>& basis) {
    for (const auto* b : basis) {
        double dot = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * (*b)[i];
        for (std::size_t i = 0; i < x.size(); ++i) x[i] -= dot * (*b)[i];
    }
}

std::vector<double> inverse_iteration(const TridiagonalHamiltonian& h, double eigenvalue, double shift,
                                      std::uint64_t start_key,
                                      const std::vector<const std::vector<double>*>& cluster) {
    const std::size_t n = h.size();
    const double scale = std::max(1.0, h.norm_bound());
    const double target = 1e-11 * scale;
    ShiftedTridiagonalLu lu(h, shift);

    CounterRng rng(start_key);
    std::vector<double> x(n);
    for (auto& v : x) v = rng.uniform() - 0.5;
    orthogonalize(x, cluster);
    normalize(x);

    // Two more solves after the residual test passes, as in LAPACK dstein:
    // the residual stops improving long before the components along distant
    // eigenvectors (e.g. tiny tails of a localized state) are resolved.
    int extra = -1;
    for (int iter = 0; iter < 50; ++iter) {
        lu.solve(x);
        orthogonalize(x, cluster);
        const double grow = normalize(x);
        if (!std::isfinite(grow) || grow == 0.0) break;
        if (extra < 0 && residual_norm(h, eigenvalue, x) < target) extra = 0;
        if (extra >= 0 && extra++ == 2) return x;
    }
    return {};
}

}  // namespace

SpectralWindowResult eigen_window(const TridiagonalHamiltonian& h, double lower, double upper, bool want_vectors) {
    if (!(lower < upper)) throw InvalidArgument("eigen_window: need lower < upper");
    SpectralWindowResult out;
    out.lower = lower;
    out.upper = upper;
    out.first_site = h.interval().first;
    out.count_below_lower = sturm_count(h, lower);
    out.count_below_upper = sturm_count(h, upper);
    const std::size_t base = out.count_below_lower;
    const std::size_t k = out.count_below_upper - base;
    if (k == 0) return out;

    const double tol = bisection_tolerance(h);
    std::vector<double> lo(k, lower), hi(k, upper);
    for (std::size_t j = 0; j < k; ++j) {
        while (hi[j] - lo[j] > tol) {
            const double mid = 0.5 * (lo[j] + hi[j]);
            if (mid <= lo[j] || mid >= hi[j]) break;
            const std::size_t c = sturm_count(h, mid);
            for (std::size_t i = j; i < k; ++i) {
                if (base + i < c)
                    hi[i] = std::min(hi[i], mid);
                else
                    lo[i] = std::max(lo[i], mid);
            }
        }
    }
    out.eigenvalues.resize(k);
    for (std::size_t j = 0; j < k; ++j) out.eigenvalues[j] = 0.5 * (lo[j] + hi[j]);
    if (!want_vectors) return out;

    const double scale = std::max(1.0, h.norm_bound());
    const double cluster_gap = 1e-10;
    out.eigenvectors.reserve(k);
    std::size_t cluster_start = 0;
    for (std::size_t j = 0; j < k; ++j) {
        if (j > 0 && out.eigenvalues[j] - out.eigenvalues[j - 1] > cluster_gap) cluster_start = j;
        std::vector<const std::vector<double>*> cluster;
        for (std::size_t i = cluster_start; i < j; ++i) cluster.push_back(&out.eigenvectors[i]);

        // Members of a cluster get distinct shifts so the factorizations differ.
        const double offset = static_cast<double>(j - cluster_start) * 10.0 * tol;
        std::vector<double> vec;
        for (int attempt = 0; attempt < 2 && vec.empty(); ++attempt) {
            const double shift = out.eigenvalues[j] + offset + attempt * 4.0 * tol;
            vec = inverse_iteration(h, out.eigenvalues[j], shift, mix64(base + j + 1) ^ attempt, cluster);
        }
        if (vec.empty())
            throw NumericalFailure("eigen_window: inverse iteration did not converge for eigenvalue " +
                                   std::to_string(out.eigenvalues[j]) + " (scale " + std::to_string(scale) + ")");
        out.eigenvectors.push_back(std::move(vec));
    }
    return out;
}

// ---------------------------------------------------------------------------

double free_ids(double energy) noexcept {
    if (energy <= -2.0) return 0.0;
    if (energy >= 2.0) return 1.0;
    return 1.0 - std::acos(energy / 2.0) / std::numbers::pi;
}

double IdsCurve::dos_at(double energy) const {
    if (dos_withheld || dos.empty()) throw InvalidArgument("dos_at: DOS was withheld");
    if (energy < energies.front() || energy > energies.back())
        throw InvalidArgument("dos_at: energy outside the grid");
    const auto it = std::upper_bound(energies.begin(), energies.end(), energy);
    if (it == energies.end()) return dos.back();
    const auto i = static_cast<std::size_t>(it - energies.begin());
    if (i == 0) return dos.front();
    const double t = (energy - energies[i - 1]) / (energies[i] - energies[i - 1]);
    return (1 - t) * dos[i - 1] + t * dos[i];
}

double IdsCurve::dos_integral() const {
    if (dos_withheld || dos.empty()) throw InvalidArgument("dos_integral: DOS was withheld");
    CompensatedSum s;
    for (std::size_t i = 1; i < energies.size(); ++i)
        s.add(0.5 * (dos[i] + dos[i - 1]) * (energies[i] - energies[i - 1]));
    return s.value();
}

namespace {

// Calls sink(counts) for every trial in trial order, counts aligned with `energies`.
template <class Sink>
void for_each_trial_counts(const IdsOptions& o, std::span<const double> energies, const WorkerPool& pool,
                           Sink&& sink) {
    constexpr std::size_t block = 256;
    for (std::size_t start = 0; start < o.trials; start += block) {
        const std::size_t len = std::min(block, o.trials - start);
        const auto counts = pool.map<std::vector<std::uint32_t>>(len, [&](std::size_t i) {
            const auto pot = model::sample_potential(o.n, seed_for_trial(o.seed, start + i));
            return sturm_counts(model::build_hamiltonian(pot, o.lambda), energies);
        });
        for (const auto& c : counts) sink(c);
    }
}

struct DifferenceMoments {
    std::vector<double> mean, stderr_of_mean;
};

DifferenceMoments central_differences(const IdsOptions& o, double h, const WorkerPool& pool) {
    const std::size_t g = o.grid.size();
    std::vector<double> energies;
    energies.reserve(2 * g);
    for (double e : o.grid) energies.push_back(e - h);
    for (double e : o.grid) energies.push_back(e + h);
    std::vector<std::int64_t> sum(g, 0), sumsq(g, 0);
    for_each_trial_counts(o, energies, pool, [&](const std::vector<std::uint32_t>& c) {
        for (std::size_t i = 0; i < g; ++i) {
            const std::int64_t diff = static_cast<std::int64_t>(c[g + i]) - c[i];
            sum[i] += diff;
            sumsq[i] += diff * diff;
        }
    });
    const double t = static_cast<double>(o.trials);
    const double scale = 2.0 * h * static_cast<double>(o.n);
    DifferenceMoments m;
    m.mean.resize(g);
    m.stderr_of_mean.resize(g);
    for (std::size_t i = 0; i < g; ++i) {
        const double mean = static_cast<double>(sum[i]) / t;
        const double var = o.trials > 1 ? std::max(0.0, (static_cast<double>(sumsq[i]) - t * mean * mean) / (t - 1)) : 0.0;
        m.mean[i] = mean / scale;
        m.stderr_of_mean[i] = std::sqrt(var / t) / scale;
    }
    return m;
}

}  // namespace

IdsCurve ids_dos(const IdsOptions& o, const WorkerPool& pool) {
    if (o.n == 0 || o.trials == 0) throw InvalidArgument("ids_dos: N and trials must be positive");
    if (o.grid.empty()) throw InvalidArgument("ids_dos: empty energy grid");
    if (!std::is_sorted(o.grid.begin(), o.grid.end()) ||
        std::adjacent_find(o.grid.begin(), o.grid.end()) != o.grid.end())
        throw InvalidArgument("ids_dos: grid must be strictly increasing");
    if (o.bandwidth && !(*o.bandwidth > 0.0)) throw InvalidArgument("ids_dos: bandwidth must be positive");

    const std::size_t g = o.grid.size();
    IdsCurve curve;
    curve.energies = o.grid;
    curve.n = o.n;
    curve.trials = o.trials;

    std::vector<std::int64_t> sum(g, 0), sumsq(g, 0);
    for_each_trial_counts(o, o.grid, pool, [&](const std::vector<std::uint32_t>& c) {
        for (std::size_t i = 0; i < g; ++i) {
            sum[i] += c[i];
            sumsq[i] += static_cast<std::int64_t>(c[i]) * c[i];
        }
    });
    const double t = static_cast<double>(o.trials);
    const double n = static_cast<double>(o.n);
    double max_stderr = 0.0;
    curve.ids.resize(g);
    curve.ids_stderr.resize(g);
    for (std::size_t i = 0; i < g; ++i) {
        const double mean = static_cast<double>(sum[i]) / t;
        const double var = o.trials > 1 ? std::max(0.0, (static_cast<double>(sumsq[i]) - t * mean * mean) / (t - 1)) : 0.0;
        curve.ids[i] = mean / n;
        curve.ids_stderr[i] = std::sqrt(var / t) / n;
        max_stderr = std::max(max_stderr, curve.ids_stderr[i]);
    }

    const double noise_floor = 5.0 * max_stderr;
    if (o.bandwidth) {
        curve.bandwidth = *o.bandwidth;
        if (curve.bandwidth < noise_floor) {
            curve.dos_withheld = true;
            return curve;
        }
    } else {
        curve.bandwidth = std::max(4.0 / n, noise_floor);
    }

    const auto diff = central_differences(o, curve.bandwidth, pool);
    curve.dos.resize(g);
    for (std::size_t i = 0; i < g; ++i) curve.dos[i] = std::max(0.0, diff.mean[i]);
    curve.dos_stderr = diff.stderr_of_mean;
    return curve;
}

// ---------------------------------------------------------------------------

LocalizationFit localization_fit(std::span<const double> vec, std::size_t first_site, std::size_t min_distance,
                                 double floor) {
    LocalizationFit fit;
    if (vec.empty()) return fit;
    std::size_t arg = 0;
    for (std::size_t j = 1; j < vec.size(); ++j)
        if (std::abs(vec[j]) > std::abs(vec[arg])) arg = j;
    fit.center = first_site + arg;
    const double peak = std::abs(vec[arg]);

    std::vector<double> xs, ys;
    for (std::size_t j = 0; j < vec.size(); ++j) {
        const std::size_t dist = j > arg ? j - arg : arg - j;
        if (dist < min_distance || dist == 0) continue;
        if (!(std::abs(vec[j]) > floor * peak)) continue;
        xs.push_back(static_cast<double>(dist));
        ys.push_back(std::log(std::abs(vec[j])));
    }
    fit.points = xs.size();
    if (xs.size() < 3) return fit;
    double xbar = 0, ybar = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        xbar += xs[i];
        ybar += ys[i];
    }
    xbar /= static_cast<double>(xs.size());
    ybar /= static_cast<double>(xs.size());
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - xbar) * (xs[i] - xbar);
        sxy += (xs[i] - xbar) * (ys[i] - ybar);
    }
    if (!(sxx > 0)) return fit;
    const double slope = sxy / sxx;
    double rss = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (ybar + slope * (xs[i] - xbar));
        rss += r * r;
    }
    fit.decay_rate = -slope;
    fit.fit_rms = std::sqrt(rss / static_cast<double>(xs.size()));
    return fit;
}

std::vector<LocalizationFit> localization_centers(const SpectralWindowResult& result, std::size_t min_distance,
                                                  double floor) {
    if (result.eigenvectors.size() != result.eigenvalues.size())
        throw InvalidArgument("localization_centers: eigenvectors were not computed");
    std::vector<LocalizationFit> fits;
    fits.reserve(result.eigenvectors.size());
    for (const auto& v : result.eigenvectors)
        fits.push_back(localization_fit(v, result.first_site, min_distance, floor));
    return fits;
}

}  // namespace anderson::spectrum
