#pragma once

// The one-dimensional Anderson-Bernoulli Hamiltonian
//
//     (H psi)_j = psi_{j+1} + psi_{j-1} + lambda * v_j * psi_j,   v_j = +-1 i.i.d.,
//
// its Dirichlet truncations to lattice intervals, and the admissibility check
// for algebraic couplings.
//
// Convention: the hopping part carries no diagonal -2 shift. The free spectrum
// is therefore [-2, 2] and the transfer matrix at site j has top-left entry
// E - lambda * v_j.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace anderson::model {

/// One Bernoulli +-1 disorder sample. Site j (1-based) is values[j - 1].
struct PotentialRealization {
    std::vector<std::int8_t> values;
    std::uint64_t seed = 0;

    std::size_t size() const noexcept { return values.size(); }
    int at(std::size_t site) const { return values.at(site - 1); }
};

/// Draws n i.i.d. fair signs from the counter-based stream keyed by `seed`.
/// Throws InvalidArgument for n == 0.
PotentialRealization sample_potential(std::size_t n, std::uint64_t seed);

/// Closed lattice interval [first, last], 1-based.
struct SiteInterval {
    std::size_t first = 1;
    std::size_t last = 1;

    std::size_t size() const noexcept { return last >= first ? last - first + 1 : 0; }
    bool contains(const SiteInterval& other) const noexcept {
        return other.first >= first && other.last <= last;
    }
    friend bool operator==(const SiteInterval&, const SiteInterval&) = default;
};

/// Symmetric tridiagonal matrix of H restricted to an interval with Dirichlet
/// boundary conditions. Off-diagonal entries are all 1.
class TridiagonalHamiltonian {
public:
    /// Takes the diagonal for the sites of `interval`, in order.
    TridiagonalHamiltonian(std::vector<double> diagonal, SiteInterval interval);

    std::size_t size() const noexcept { return diagonal_.size(); }
    std::span<const double> diagonal() const noexcept { return diagonal_; }
    /// Diagonal entry at absolute lattice site `site`.
    double diagonal_at(std::size_t site) const;
    static constexpr double offdiagonal() noexcept { return 1.0; }
    const SiteInterval& interval() const noexcept { return interval_; }

    /// Gershgorin enclosure [min_j d_j - 2, max_j d_j + 2] (tightened to one
    /// neighbour at the ends).
    std::pair<double, double> gershgorin_bounds() const noexcept;
    /// Upper bound on the operator norm, max(|lo|, |hi|) of the Gershgorin interval.
    double norm_bound() const noexcept;

    /// Dirichlet restriction to a sub-interval, sharing the potential entries.
    /// Throws InvalidArgument if `sub` is empty or not contained in interval().
    TridiagonalHamiltonian restrict(SiteInterval sub) const;

    /// y = H x.
    std::vector<double> apply(std::span<const double> x) const;

private:
    std::vector<double> diagonal_;
    SiteInterval interval_;
};

/// H restricted to `interval`: diagonal lambda * v_j for j in the interval.
/// Throws InvalidArgument if the interval is empty or exceeds [1, pot.size()].
TridiagonalHamiltonian build_hamiltonian(const PotentialRealization& pot, double lambda,
                                         SiteInterval interval);

/// Whole-chain shorthand for build_hamiltonian(pot, lambda, {1, n}).
TridiagonalHamiltonian build_hamiltonian(const PotentialRealization& pot, double lambda);

// ---------------------------------------------------------------------------
// Algebraic couplings

/// Candidate coupling with its integer minimal polynomial, lowest degree first.
struct CouplingSpec {
    double lambda = 0.0;
    std::vector<std::int64_t> poly_coeffs;
    double coeff_bound_exponent = 0.0;  // C
    double lambda0 = 0.0;

    int degree() const noexcept { return static_cast<int>(poly_coeffs.size()) - 1; }
};

struct CouplingReport {
    bool small_coupling = false;     // |lambda| < lambda0
    bool algebraic_bounds = false;   // degree < C and max|a_i| <= (1/|lambda|)^C
    bool large_conjugate = false;    // some other root has modulus >= 1
    bool irreducibility_checked = false;  // always false: only P(lambda) ~ 0 is verified

    int degree = 0;                             // of the primitive polynomial
    std::vector<std::int64_t> primitive_coeffs;  // content removed, leading coefficient > 0
    std::int64_t max_coefficient = 0;
    double coefficient_bound = 0.0;  // (1/|lambda|)^C
    double root_residual = 0.0;      // |P(lambda)| / |P'(lambda)|, a Newton-step distance
    std::vector<std::complex<double>> conjugates;  // every root except the one matched to lambda
    std::vector<double> conjugate_moduli;

    bool all_pass() const noexcept { return small_coupling && algebraic_bounds && large_conjugate; }
};

/// Tolerance on |P(lambda)| / |P'(lambda)| for accepting lambda as a root.
inline constexpr double kRootTolerance = 1e-8;

/// Checks the three admissibility conditions on an algebraic coupling.
///
/// The polynomial is first reduced to its primitive part, so the report does
/// not change when all coefficients are scaled by a nonzero integer. Roots come
/// from the eigenvalues of the companion matrix, polished by Newton steps.
///
/// Throws InvalidArgument for an empty or identically zero polynomial, a zero
/// leading coefficient, or a lambda that is not a root.
CouplingReport validate_coupling(const CouplingSpec& spec);

/// Roots of a real polynomial given lowest degree first (degree >= 1).
std::vector<std::complex<double>> polynomial_roots(std::span<const double> coeffs);

}  // namespace anderson::model
