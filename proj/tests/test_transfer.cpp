#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "anderson/errors.hpp"
#include "anderson/model.hpp"
#include "anderson/rng.hpp"
#include "anderson/transfer.hpp"
#include "oracles.hpp"

using namespace anderson;
using namespace anderson::transfer;
using std::numbers::pi;

TEST_CASE("transfer_step examples") {
    const auto r = transfer_step(0.0, 1, 0.0);
    CHECK(r.a == 0.0);
    CHECK(r.b == -1.0);
    CHECK(r.c == 1.0);
    CHECK(r.d == 0.0);
    const auto g = transfer_step(1.0, -1, 0.5);
    CHECK(g.a == 1.5);
    CHECK(g.b == -1.0);

    CounterRng rng(1);
    for (int i = 0; i < 100; ++i) {
        const double e = 8 * rng.uniform() - 4, l = 3 * rng.uniform();
        CHECK(transfer_step(e, rng.sign(), l).det() == 1.0);
    }
}

TEST_CASE("single-factor product equals the step") {
    model::PotentialRealization pot;
    pot.values = {-1};
    const auto m = transfer_product(0.3, pot, 0.7);
    const auto g = transfer_step(0.3, -1, 0.7);
    const auto n = m.matrix();
    const double s = std::exp(m.log_scale());
    CHECK(n.a * s == doctest::Approx(g.a));
    CHECK(n.b * s == doctest::Approx(g.b));
    CHECK(n.c * s == doctest::Approx(g.c));
    CHECK(n.d * s == doctest::Approx(g.d));
    CHECK(m.length() == 1);
}

TEST_CASE("normalized matrix and determinant invariant") {
    CounterRng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 60);
        const auto pot = model::sample_potential(n, rng());
        const auto m = transfer_product(3 * rng.uniform() - 1.5, pot, rng.uniform());
        const auto a = m.matrix();
        const double top = std::max({std::abs(a.a), std::abs(a.b), std::abs(a.c), std::abs(a.d)});
        CHECK(top == doctest::Approx(1.0));
        // ad - bc from the entries carries rounding of order eps * ||M||^2
        const double scale = std::exp(2 * m.log_scale());
        const double frob = a.a * a.a + a.b * a.b + a.c * a.c + a.d * a.d;
        CHECK(std::abs(a.det() * scale - 1.0) <= 8 * std::numeric_limits<double>::epsilon() * frob * scale);
        CHECK(std::abs(m.log_det()) < 1e-12);
        CHECK(m.log_norm() == doctest::Approx(m.log_scale() + std::log(a.norm())).epsilon(1e-12));
    }
}

TEST_CASE("determinant invariant for a product of length 1e6") {
    const auto pot = model::sample_potential(1'000'000, 8);
    const auto m = transfer_product(0.5, pot, 0.5);
    CHECK(std::abs(m.log_det()) < 1e-8);
    CHECK(std::isfinite(m.log_norm()));
}

TEST_CASE("direction matches the extended-precision recursion") {
    // E = 0.5, lambda = 0.5, n = 10^4
    const auto pot = model::sample_potential(10'000, 21);
    const Vec2 start{1.0, 0.25};
    const auto [dir, log_len] = transfer_product(0.5, pot, 0.5).apply(start);
    const auto ref = oracle::recursion(0.5L, 0.5L, pot, start);
    CHECK(oracle::direction_error(dir, ref) < 1e-8);
    CHECK(log_len == doctest::Approx(static_cast<double>(ref.log_length)).epsilon(1e-10));

    CounterRng rng(99);
    for (int t = 0; t < 100; ++t) {
        const double e = 3 * rng.uniform() - 1.5, l = rng.uniform();
        const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 3000);
        const auto p = model::sample_potential(n, rng());
        const Vec2 v{rng.uniform() - 0.5, rng.uniform() - 0.5};
        const auto got = transfer_product(e, p, l).apply(v);
        REQUIRE(oracle::direction_error(got.first, oracle::recursion(e, l, p, v)) < 1e-8);
    }
}

TEST_CASE("free chain: bounded norm inside the band") {
    const auto pot = model::sample_potential(200'000, 4);
    const auto m = transfer_product(1.0, pot, 0.0);
    CHECK(m.log_norm() / 200'000.0 < 1e-4);
}

TEST_CASE("transfer_product rejects bad input") {
    model::PotentialRealization empty;
    CHECK_THROWS_AS(transfer_product(0.5, empty, 0.5), InvalidArgument);
    const auto pot = model::sample_potential(4, 1);
    CHECK_THROWS_AS(transfer_product(std::nan(""), pot, 0.5), InvalidArgument);
}

TEST_CASE("projective action examples") {
    CHECK(projective_action(Mat2{}, ProjectiveAngle(0.7)).theta() == doctest::Approx(0.7));
    CHECK(projective_action(Mat2::rotation(0.3), ProjectiveAngle(0.5)).theta() == doctest::Approx(0.8));
    CHECK(projective_action(Mat2{2.0, 0.0, 0.0, 0.5}, ProjectiveAngle(pi / 4)).theta() ==
          doctest::Approx(std::atan(0.25)).epsilon(1e-12));
    CHECK(std::atan(0.25) == doctest::Approx(0.244979).epsilon(1e-6));
    CHECK_THROWS_AS(projective_action(Mat2{1, 2, 2, 4}, ProjectiveAngle(0.1)), InvalidArgument);

    const ProjectiveAngle p(3.5);
    CHECK(p.theta() >= 0.0);
    CHECK(p.theta() < pi);
    CHECK(std::hypot(p.unit().x, p.unit().y) == doctest::Approx(1.0));
    CHECK(projective_distance(p.perpendicular().theta(), p.theta()) == doctest::Approx(pi / 2));
}

TEST_CASE("projective action is a group action") {
    CounterRng rng(12);
    for (int i = 0; i < 100; ++i) {
        auto random_sl2 = [&] {
            const double a = 2 * rng.uniform() + 0.1, b = 4 * rng.uniform() - 2, c = 4 * rng.uniform() - 2;
            return Mat2{a, b, c, (1 + b * c) / a};
        };
        const auto g = random_sl2(), h = random_sl2();
        const ProjectiveAngle th(pi * rng.uniform());
        const double lhs = projective_action(g * h, th).theta();
        const double rhs = projective_action(g, projective_action(h, th)).theta();
        CHECK(projective_distance(lhs, rhs) < 1e-10);
    }
}

TEST_CASE("Furstenberg estimate basics") {
    FurstenbergOptions o;
    o.steps = 200'000;
    o.seed = 1;
    const auto est = furstenberg_estimate(0.5, 0.5, o);
    double total = 0;
    for (double m : est.mass) {
        CHECK(m >= 0.0);
        total += m;
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
    CHECK(est.stationarity_residual >= 0.0);
    CHECK(est.bins() == 512);
    CHECK_THROWS_AS(furstenberg_estimate(0.5, 0.0, o), DegenerateCoupling);
}

TEST_CASE("pushforward by a rotation shifts the histogram") {
    std::vector<double> mass(8, 0.0);
    mass[1] = 1.0;
    const auto out = pushforward(mass, Mat2::rotation(pi / 4));  // two bins of width pi/8
    CHECK(out[3] == doctest::Approx(1.0));
    const auto centers = pushforward(mass, Mat2::rotation(pi / 4), PushforwardRule::bin_centers);
    CHECK(centers[3] == doctest::Approx(1.0));
}

TEST_CASE("tau_max_interval") {
    FurstenbergEstimate uniform;
    uniform.mass.assign(512, 1.0 / 512);
    CHECK(tau_max_interval(uniform, pi) == 1.0);
    CHECK(tau_max_interval(uniform, pi / 4) == doctest::Approx(0.25));
    CHECK_THROWS_AS(tau_max_interval(uniform, 0.0), InvalidArgument);

    FurstenbergOptions o;
    o.steps = 200'000;
    o.seed = 2;
    const auto est = furstenberg_estimate(0.3, 0.7, o);
    double prev = 0.0;
    for (double eps = 0.01; eps < pi / 2; eps *= 1.3) {
        const double t1 = tau_max_interval(est, eps), t2 = tau_max_interval(est, 2 * eps);
        CHECK(t1 >= prev - 1e-15);
        CHECK(t1 <= t2 + 1e-15);
        CHECK(t2 <= 2 * t1 + 1e-12);
        prev = t1;
    }
}

TEST_CASE("Lyapunov exponent") {
    for (double e : {0.0, 0.5, 1.0}) {
        const auto l = lyapunov_exponent(e, 0.0, 10'000, 4, 1);
        CHECK(std::abs(l.value) < 0.01);
    }
    const auto l = lyapunov_exponent(0.5, 0.5, 10'000, 50, 3);
    CHECK(l.value > 5 * l.std_error);
    CHECK_THROWS_AS(lyapunov_exponent(0.5, 0.5, 0, 10, 1), InvalidArgument);
    CHECK_THROWS_AS(lyapunov_exponent(0.5, 0.5, 10, 1, 1), InvalidArgument);
}

TEST_CASE("Lyapunov exponent at N and 2N agree") {
    const auto a = lyapunov_exponent(0.7, 1.0, 2000, 200, 5);
    const auto b = lyapunov_exponent(0.7, 1.0, 4000, 200, 6);
    // finite-N bias is O(1/N), far below the joint error here
    CHECK(std::abs(a.value - b.value) < 3 * std::hypot(a.std_error, b.std_error) + 2e-3);
}

TEST_CASE("deviation tail") {
    // |(1/N) log ||M|| - L| <= log(2 + lambda) + L, so sigma beyond that never fires
    const double lambda = 0.5;
    const auto p = deviation_tail(0.5, lambda, 100, std::log(2 + lambda) + 1.0, 0.03, 500, 1);
    CHECK(p.successes == 0);

    std::vector<std::size_t> sizes{250, 500, 1000, 2000};
    std::vector<BinomialEstimate> tails;
    for (std::size_t i = 0; i < sizes.size(); ++i)
        tails.push_back(deviation_tail(0.5, 0.5, sizes[i], 0.02, 0.0328, 2000, 40 + i));
    for (std::size_t i = 1; i < tails.size(); ++i) CHECK(tails[i].probability <= tails[i - 1].probability);
    const auto fit = fit_tail_decay(sizes, tails);
    REQUIRE(fit.fitted);
    CHECK(fit.rate > 0.0);
}

TEST_CASE("angle concentration") {
    AngleConcentrationOptions o;
    o.n = 200;
    o.trials = 500;
    o.eps = 1.0;
    CHECK(angle_concentration(o).probability == 1.0);
    o.eps = 0.0;
    CHECK(angle_concentration(o).probability == 0.0);
    o.eps = 0.05;
    o.n = 20;
    CHECK_THROWS_AS(angle_concentration(o), PreconditionViolation);
}

TEST_CASE("uniform norm bound") {
    UniformNormOptions o;
    o.kappa = 0.0;
    o.n = 300;
    o.trials = 400;
    o.lyapunov = 0.0328;
    o.constant = 0.0;
    o.seed = 9;
    // kappa = 0 is the single-energy event log||M_N|| > L N
    const auto p = uniform_norm_bound(o);
    std::size_t hits = 0;
    for (std::size_t t = 0; t < o.trials; ++t) {
        const auto pot = model::sample_potential(o.n, seed_for_trial(o.seed, t));
        hits += transfer_product(o.energy0, pot, o.lambda).log_norm() > o.lyapunov * o.n;
    }
    CHECK(p.successes == hits);

    o.kappa = 0.05;
    o.constant = 100.0;  // c kappa^alpha N above N log(2 + lambda)
    CHECK(uniform_norm_bound(o).successes == 0);
}
