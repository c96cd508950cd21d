#pragma once

// Eigenvalues and eigenvectors of Dirichlet-truncated Hamiltonians, the
// integrated density of states, and localization diagnostics.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "anderson/model.hpp"
#include "anderson/parallel.hpp"

namespace anderson::spectrum {

using model::SiteInterval;
using model::TridiagonalHamiltonian;

/// Number of eigenvalues of H below E, from the sign changes of the Sturm
/// sequence q_1 = d_1 - E, q_i = d_i - E - 1/q_{i-1}. A pivot with
/// |q| < 1e-300 * max(1, ||H||) is replaced by its negative threshold before
/// it is counted, so an eigenvalue exactly at E (a measure-zero event for
/// generic E) is counted as below.
std::size_t sturm_count(const TridiagonalHamiltonian& h, double energy);

/// sturm_count at many energies in one sweep over the sites.
std::vector<std::uint32_t> sturm_counts(const TridiagonalHamiltonian& h, std::span<const double> energies);

struct SpectralWindowResult {
    double lower = 0.0;
    double upper = 0.0;
    std::size_t count_below_lower = 0;
    std::size_t count_below_upper = 0;
    std::vector<double> eigenvalues;                // increasing
    std::vector<std::vector<double>> eigenvectors;  // unit 2-norm; empty unless requested
    std::size_t first_site = 1;                     // lattice site of component 0
};

/// Absolute bisection tolerance used by eigen_window: 1e-12 * max(1, ||H||).
double bisection_tolerance(const TridiagonalHamiltonian& h) noexcept;

/// Eigenvalues in [lower, upper) by bisection on sturm_count, optionally with
/// eigenvectors by inverse iteration. Eigenvalues closer than 1e-10 have their
/// vectors re-orthogonalized. Throws InvalidArgument unless lower < upper and
/// NumericalFailure if inverse iteration does not converge.
SpectralWindowResult eigen_window(const TridiagonalHamiltonian& h, double lower, double upper,
                                  bool want_vectors);

/// ||(H - E) x||_2.
double residual_norm(const TridiagonalHamiltonian& h, double energy, std::span<const double> x);

/// Dirichlet restriction; see TridiagonalHamiltonian::restrict.
TridiagonalHamiltonian restrict(const TridiagonalHamiltonian& h, SiteInterval sub);

// ---------------------------------------------------------------------------

struct IdsOptions {
    double lambda = 0.5;
    std::size_t n = 1000;
    std::size_t trials = 100;
    std::vector<double> grid;
    /// Finite-difference half-width h. Defaults to max(4/N, 5 * max stderr of ids).
    std::optional<double> bandwidth;
    std::uint64_t seed = 0;
};

struct IdsCurve {
    std::vector<double> energies;
    std::vector<double> ids;
    std::vector<double> ids_stderr;
    std::vector<double> dos;         // empty when withheld
    std::vector<double> dos_stderr;  // empty when withheld
    std::size_t n = 0;
    std::size_t trials = 0;
    double bandwidth = 0.0;
    bool dos_withheld = false;  // bandwidth below 5 * stderr of ids

    /// Linear interpolation of the DOS. Throws InvalidArgument when the DOS is
    /// withheld or E is off the grid.
    double dos_at(double energy) const;
    /// Trapezoid integral of the DOS over the grid.
    double dos_integral() const;
};

/// IDS as E[sturm_count(H_N, E)] / N over disorder, DOS by the central
/// difference (ids(E + h) - ids(E - h)) / 2h, clamped at 0.
IdsCurve ids_dos(const IdsOptions& opts, const WorkerPool& pool = WorkerPool{});

/// Closed-form IDS of the free chain, 1 - arccos(E/2)/pi on [-2, 2].
double free_ids(double energy) noexcept;

// ---------------------------------------------------------------------------

struct LocalizationFit {
    std::size_t center = 0;             // lattice site of max |xi|, smallest on ties
    std::optional<double> decay_rate;   // -slope of log|xi| against |j - center|
    std::optional<double> fit_rms;      // root-mean-square residual of that fit
    std::size_t points = 0;
};

/// Fits one vector. Uses sites with |j - center| >= min_distance and
/// |xi_j| > floor * max|xi|; needs three such sites, otherwise the fit is omitted.
LocalizationFit localization_fit(std::span<const double> vec, std::size_t first_site,
                                 std::size_t min_distance, double floor = 1e-12);

/// localization_fit for every eigenvector of a window result. Throws
/// InvalidArgument when the result carries no eigenvectors.
std::vector<LocalizationFit> localization_centers(const SpectralWindowResult& result,
                                                  std::size_t min_distance, double floor = 1e-12);

}  // namespace anderson::spectrum
