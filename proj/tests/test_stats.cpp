#include <doctest.h>

#include <cmath>
#include <set>

#include "anderson/errors.hpp"
#include "anderson/model.hpp"
#include "anderson/rng.hpp"
#include "anderson/spectrum.hpp"
#include "anderson/stats.hpp"

using namespace anderson;
using namespace anderson::stats;

namespace {

WindowExperiment small_experiment() {
    WindowExperiment e;
    e.energy0 = 0.5;
    e.lambda = 0.5;
    e.n = 100;
    e.trials = 400;
    e.seed = 11;
    e.band_margin = 0.1;
    return e;
}

}  // namespace

TEST_CASE("window probabilities: degenerate windows") {
    auto e = small_experiment();
    CHECK(wegner_probability(e, 0.0).probability == 0.0);
    CHECK(minami_probability(e, 0.0).probability == 0.0);
    CHECK(expected_trace(e, 0.0, 0.2).mean == 0.0);

    e.band_margin.reset();
    e.trials = 20;
    CHECK(wegner_probability(e, 10.0).probability == 1.0);
    CHECK(expected_trace(e, 10.0, 0.2).mean == doctest::Approx(100.0));

    // eigenvalues of a 2x2 block with unit coupling are at least 2 apart
    e.n = 2;
    CHECK(minami_probability(e, 0.5).probability == 0.0);
}

TEST_CASE("window preconditions") {
    auto e = small_experiment();
    CHECK_THROWS_AS(wegner_probability(e, 1.5), PreconditionViolation);
    CHECK_THROWS_AS(minami_probability(e, std::exp(-20.0)), PreconditionViolation);
    CHECK_THROWS_AS(expected_trace(e, std::exp(-200.0), 0.2), PreconditionViolation);
    CHECK_THROWS_AS(require_in_band(-1.95, 0.0, 0.1), PreconditionViolation);
    CHECK_NOTHROW(require_in_band(-1.95, 0.0, std::nullopt));
}

TEST_CASE("ordering of window statistics on common realizations") {
    const auto e = small_experiment();
    for (double d : {0.003, 0.01, 0.03, 0.1}) {
        const auto w = wegner_probability(e, d);
        const auto m = minami_probability(e, d);
        const auto t = expected_trace(e, d, 0.2);
        CHECK(w.probability >= m.probability);
        CHECK(t.mean >= w.probability);
    }
    const auto sweep = wegner_sweep(e, {0.003, 0.01, 0.03});
    for (std::size_t i = 1; i < sweep.cells.size(); ++i)
        CHECK(sweep.cells[i].estimate.probability >= sweep.cells[i - 1].estimate.probability);
}

TEST_CASE("log-log slope fit") {
    std::vector<ScalingCell> cells;
    for (double d : {0.01, 0.02, 0.04, 0.08}) {
        ScalingCell c;
        c.delta = d;
        c.estimate = binomial_estimate(static_cast<std::size_t>(std::llround(1e6 * d * d)), 1'000'000);
        cells.push_back(c);
    }
    const auto fit = fit_loglog_slope(cells);
    REQUIRE(fit.fitted);
    CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-3));

    cells.front().estimate = binomial_estimate(0, 1'000'000);
    const auto dropped = fit_loglog_slope(cells);
    CHECK(dropped.cells_used == 3);
    REQUIRE(dropped.dropped_deltas.size() == 1);
    CHECK(dropped.dropped_deltas[0] == 0.01);
}

TEST_CASE("near resonance: examples") {
    const auto h = model::build_hamiltonian(model::sample_potential(64, 3), 0.5);
    CHECK_FALSE(near_resonance_event(h, 0.5, 0.0).occurred);
    CHECK(boundary_zone_width(64) == 7);
    CHECK(boundary_zone_width(100) == 9);

    const auto tiny = model::build_hamiltonian(model::sample_potential(15, 3), 0.5);
    CHECK_THROWS_AS(near_resonance_event(tiny, 0.5, 0.1), InvalidArgument);

    // extended states of the free chain reach the boundary
    const model::TridiagonalHamiltonian free({std::vector<double>(64, 0.0)}, {1, 64});
    CHECK_FALSE(near_resonance_event(free, 0.5, 0.2).occurred);
}

TEST_CASE("near resonance: two wells deep inside a barrier") {
    // one-site wells in a high plateau bind states at t when the well is t + 2/(50 - t)
    const double e0 = 0.5;
    std::vector<double> diag(64, 50.0);
    for (auto [site, t] : {std::pair{20, e0 - 0.05}, std::pair{44, e0 + 0.05}})
        diag[static_cast<std::size_t>(site - 1)] = t + 2.0 / (50.0 - t);
    const model::TridiagonalHamiltonian h(diag, {1, 64});
    const auto r = near_resonance_event(h, e0, 0.1);
    REQUIRE(r.eigenvalues.size() == 2);
    CHECK(r.witness.has_value());
    CHECK(r.boundary_max < r.threshold);
    CHECK(r.occurred);
}

TEST_CASE("rescaling") {
    const auto s = rescale_points({0.5 + 0.3 / 200, 0.5 - 0.1, 0.5 + 6.0 / 200, 0.5 + 2.0 / 200}, 200, 0.5, 5.0);
    REQUIRE(s.points.size() == 2);
    CHECK(s.points[0] == doctest::Approx(0.3));
    CHECK(s.points[1] == doctest::Approx(2.0));
    CHECK(s.length == 5.0);

    const auto pot = model::sample_potential(300, 5);
    const auto h = model::build_hamiltonian(pot, 0.5);
    const auto direct = spectrum::eigen_window(h, 0.5, 0.5 + 5.0 / 300, false);
    CHECK(rescaled_sample(pot, 0.5, 0.5, 5.0).points.size() == direct.eigenvalues.size());
}

TEST_CASE("Poisson tests on synthetic data") {
    const auto good = synthetic_poisson_samples(2000, 1.0, 5.0, 1);
    const auto r = poisson_tests(good);
    CHECK(r.samples == 2000);
    CHECK(r.count_mean == doctest::Approx(5.0).epsilon(0.05));
    CHECK(r.passes(0.01));
    CHECK(r.pooled_p > 0.01);

    // picket fence: every trial has the same count
    std::vector<PointProcessSample> fence(600);
    for (auto& s : fence) {
        s.length = 5.0;
        s.points = {0.5, 1.5, 2.5, 3.5, 4.5};
    }
    const auto f = poisson_tests(fence);
    CHECK(f.count_variance == 0.0);
    CHECK(f.count_p < 0.01);
    CHECK_FALSE(f.passes(0.01));

    const std::vector<PointProcessSample> few(kMinPoissonSamples - 1, fence.front());
    CHECK_THROWS_AS(poisson_tests(few), InvalidArgument);
    auto mixed = fence;
    mixed[3].length = 4.0;
    CHECK_THROWS_AS(poisson_tests(mixed), InvalidArgument);

    const auto with_k = poisson_tests(good, 0.2);
    REQUIRE(with_k.expected_mean.has_value());
    CHECK(*with_k.expected_mean == doctest::Approx(1.0));
}

TEST_CASE("p-value helpers") {
    CHECK(kolmogorov_p_value(0.0, 100) == doctest::Approx(1.0));
    CHECK(kolmogorov_p_value(0.5, 1000) < 1e-12);
    CHECK(kolmogorov_p_value(1.36 / std::sqrt(2000.0), 2000) == doctest::Approx(0.05).epsilon(0.05));
    CHECK(chi_square_p_value(3.0, 2) == doctest::Approx(std::exp(-1.5)));
    CHECK(chi_square_p_value(0.0, 5) == doctest::Approx(1.0));
}

TEST_CASE("localization partition") {
    const auto one = localization_partition(50, 50);
    REQUIRE(one.windows.size() == 1);
    CHECK(one.windows[0] == model::SiteInterval{1, 50});

    const auto p = localization_partition(100, 20);
    CHECK(p.margin == 2);
    std::set<std::size_t> covered;
    for (const auto& w : p.windows) {
        CHECK(w.size() == 20);
        CHECK(w.first >= 1);
        CHECK(w.last <= 100);
        for (std::size_t j = w.first; j <= w.last; ++j) covered.insert(j);
    }
    CHECK(covered.size() == 100);
    const auto pairs = p.independent_pairs();
    CHECK_FALSE(pairs.empty());
    for (auto [i, j] : pairs) {
        CHECK(i < j);
        CHECK((p.windows[i].last < p.windows[j].first || p.windows[j].last < p.windows[i].first));
    }
    CHECK_FALSE(p.disjoint(0, 1));

    CHECK_THROWS_AS(localization_partition(10, 11), InvalidArgument);
    CHECK_THROWS_AS(localization_partition(10, 0), InvalidArgument);
    CHECK(default_partition_scale(100) == 100);
    CHECK(default_partition_subscale(100) == 98);
}
