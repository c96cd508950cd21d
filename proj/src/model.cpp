#include "anderson/model.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "anderson/errors.hpp"
#include "anderson/rng.hpp"

namespace anderson::model {

PotentialRealization sample_potential(std::size_t n, std::uint64_t seed) {
    if (n == 0) throw InvalidArgument("sample_potential: size must be positive");
    PotentialRealization pot;
    pot.seed = seed;
    pot.values.resize(n);
    CounterRng rng(seed);
    for (auto& v : pot.values) v = static_cast<std::int8_t>(rng.sign());
    return pot;
}

TridiagonalHamiltonian::TridiagonalHamiltonian(std::vector<double> diagonal, SiteInterval interval)
    : diagonal_(std::move(diagonal)), interval_(interval) {
    if (diagonal_.empty()) throw InvalidArgument("TridiagonalHamiltonian: empty interval");
    if (interval_.first < 1 || interval_.size() != diagonal_.size())
        throw InvalidArgument("TridiagonalHamiltonian: interval does not match diagonal length");
}

double TridiagonalHamiltonian::diagonal_at(std::size_t site) const {
    if (site < interval_.first || site > interval_.last)
        throw InvalidArgument("diagonal_at: site " + std::to_string(site) + " outside interval");
    return diagonal_[site - interval_.first];
}

std::pair<double, double> TridiagonalHamiltonian::gershgorin_bounds() const noexcept {
    const std::size_t n = diagonal_.size();
    double lo = diagonal_[0], hi = diagonal_[0];
    for (std::size_t i = 0; i < n; ++i) {
        const double radius = (i > 0 ? 1.0 : 0.0) + (i + 1 < n ? 1.0 : 0.0);
        lo = std::min(lo, diagonal_[i] - radius);
        hi = std::max(hi, diagonal_[i] + radius);
    }
    return {lo, hi};
}

double TridiagonalHamiltonian::norm_bound() const noexcept {
    const auto [lo, hi] = gershgorin_bounds();
    return std::max(std::abs(lo), std::abs(hi));
}

TridiagonalHamiltonian TridiagonalHamiltonian::restrict(SiteInterval sub) const {
    if (sub.size() == 0) throw InvalidArgument("restrict: empty sub-interval");
    if (!interval_.contains(sub))
        throw InvalidArgument("restrict: [" + std::to_string(sub.first) + ", " +
                              std::to_string(sub.last) + "] not inside [" +
                              std::to_string(interval_.first) + ", " +
                              std::to_string(interval_.last) + "]");
    const auto begin = diagonal_.begin() + static_cast<std::ptrdiff_t>(sub.first - interval_.first);
    return TridiagonalHamiltonian({begin, begin + static_cast<std::ptrdiff_t>(sub.size())}, sub);
}

std::vector<double> TridiagonalHamiltonian::apply(std::span<const double> x) const {
    const std::size_t n = size();
    if (x.size() != n) throw InvalidArgument("apply: vector length mismatch");
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = diagonal_[i] * x[i];
        if (i > 0) s += x[i - 1];
        if (i + 1 < n) s += x[i + 1];
        y[i] = s;
    }
    return y;
}

TridiagonalHamiltonian build_hamiltonian(const PotentialRealization& pot, double lambda,
                                         SiteInterval interval) {
    if (interval.size() == 0 || interval.first < 1 || interval.last > pot.size())
        throw InvalidArgument("build_hamiltonian: interval [" + std::to_string(interval.first) +
                              ", " + std::to_string(interval.last) + "] outside [1, " +
                              std::to_string(pot.size()) + "]");
    std::vector<double> diag(interval.size());
    for (std::size_t j = interval.first; j <= interval.last; ++j)
        diag[j - interval.first] = lambda * pot.values[j - 1];
    return TridiagonalHamiltonian(std::move(diag), interval);
}

TridiagonalHamiltonian build_hamiltonian(const PotentialRealization& pot, double lambda) {
    return build_hamiltonian(pot, lambda, {1, pot.size()});
}

// ---------------------------------------------------------------------------

namespace {

std::complex<double> horner(std::span<const double> c, std::complex<double> z) {
    std::complex<double> p = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) p = p * z + *it;
    return p;
}

std::complex<double> horner_derivative(std::span<const double> c, std::complex<double> z) {
    std::complex<double> p = 0.0;
    for (std::size_t i = c.size() - 1; i >= 1; --i) p = p * z + static_cast<double>(i) * c[i];
    return p;
}

}  // namespace

std::vector<std::complex<double>> polynomial_roots(std::span<const double> coeffs) {
    if (coeffs.size() < 2 || coeffs.back() == 0.0)
        throw InvalidArgument("polynomial_roots: need degree >= 1 with nonzero leading coefficient");
    const auto d = static_cast<Eigen::Index>(coeffs.size() - 1);
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index i = 1; i < d; ++i) companion(i, i - 1) = 1.0;
    for (Eigen::Index i = 0; i < d; ++i)
        companion(i, d - 1) = -coeffs[static_cast<std::size_t>(i)] / coeffs.back();

    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    if (solver.info() != Eigen::Success) throw NumericalFailure("polynomial_roots: eigensolver failed");

    std::vector<std::complex<double>> roots;
    roots.reserve(static_cast<std::size_t>(d));
    for (Eigen::Index i = 0; i < d; ++i) {
        std::complex<double> z = solver.eigenvalues()(i);
        // Newton polish; keep a step only if it reduces |P|.
        for (int iter = 0; iter < 8; ++iter) {
            const auto p = horner(coeffs, z);
            const auto dp = horner_derivative(coeffs, z);
            if (std::abs(dp) == 0.0) break;
            const auto next = z - p / dp;
            if (std::abs(horner(coeffs, next)) >= std::abs(p)) break;
            z = next;
        }
        roots.push_back(z);
    }
    std::sort(roots.begin(), roots.end(), [](auto a, auto b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return roots;
}

CouplingReport validate_coupling(const CouplingSpec& spec) {
    if (spec.poly_coeffs.empty()) throw InvalidArgument("validate_coupling: empty polynomial");
    if (std::all_of(spec.poly_coeffs.begin(), spec.poly_coeffs.end(), [](auto a) { return a == 0; }))
        throw InvalidArgument("validate_coupling: degenerate polynomial (all coefficients zero)");
    if (spec.poly_coeffs.back() == 0)
        throw InvalidArgument("validate_coupling: leading coefficient must be nonzero");
    if (!std::isfinite(spec.lambda)) throw InvalidArgument("validate_coupling: lambda is not finite");

    CouplingReport report;
    std::int64_t content = 0;
    for (auto a : spec.poly_coeffs) content = std::gcd(content, a < 0 ? -a : a);
    const std::int64_t sign = spec.poly_coeffs.back() < 0 ? -1 : 1;
    report.primitive_coeffs.reserve(spec.poly_coeffs.size());
    for (auto a : spec.poly_coeffs) report.primitive_coeffs.push_back(sign * (a / content));
    report.degree = static_cast<int>(report.primitive_coeffs.size()) - 1;
    for (auto a : report.primitive_coeffs)
        report.max_coefficient = std::max(report.max_coefficient, a < 0 ? -a : a);

    if (report.degree == 0)
        throw InvalidArgument("validate_coupling: lambda is not a root of a nonzero constant");

    std::vector<double> c(report.primitive_coeffs.begin(), report.primitive_coeffs.end());
    const double p = std::abs(horner(c, spec.lambda));
    const double dp = std::abs(horner_derivative(c, spec.lambda));
    report.root_residual = dp > 0.0 ? p / dp : p;
    if (report.root_residual > kRootTolerance * std::max(1.0, std::abs(spec.lambda)))
        throw InvalidArgument("validate_coupling: lambda = " + std::to_string(spec.lambda) +
                              " is not a root of the polynomial (Newton distance " +
                              std::to_string(report.root_residual) + ")");

    auto roots = polynomial_roots(c);
    const auto self = std::min_element(roots.begin(), roots.end(), [&](auto a, auto b) {
        return std::abs(a - spec.lambda) < std::abs(b - spec.lambda);
    });
    roots.erase(self);
    report.conjugates = roots;
    for (const auto& r : roots) report.conjugate_moduli.push_back(std::abs(r));

    report.small_coupling = std::abs(spec.lambda) < spec.lambda0;
    report.coefficient_bound = std::pow(1.0 / std::abs(spec.lambda), spec.coeff_bound_exponent);
    report.algebraic_bounds = report.degree < spec.coeff_bound_exponent &&
                              static_cast<double>(report.max_coefficient) <= report.coefficient_bound;
    report.large_conjugate = std::any_of(report.conjugate_moduli.begin(), report.conjugate_moduli.end(),
                                         [](double m) { return m >= 1.0 - kRootTolerance; });
    return report;
}

}  // namespace anderson::model
