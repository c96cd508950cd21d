#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "anderson/errors.hpp"
#include "anderson/model.hpp"
#include "anderson/rng.hpp"

using namespace anderson;

TEST_CASE("philox4x32-10 known-answer vectors") {
    using A4 = std::array<std::uint32_t, 4>;
    CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("seed_for_trial matches the golden file") {
    std::ifstream in(ANDERSON_GOLDEN_DIR "/seed_for_trial.json");
    REQUIRE(in);
    const auto j = nlohmann::json::parse(in);
    const auto base = j["base_seed"].get<std::uint64_t>();
    REQUIRE(base == 0x12345678ULL);
    CHECK(seed_for_trial(base, j["trial"].get<std::uint64_t>()) == j["stream_key"].get<std::uint64_t>());
}

TEST_CASE("seed_for_trial separates trials and base seeds") {
    for (std::uint64_t s : {0ULL, 1ULL, 0x12345678ULL, ~0ULL}) CHECK(seed_for_trial(s, 0) != seed_for_trial(s, 1));

    // Birthday scan: 10^4 draws from each of 100 base seeds (first draw of each
    // of 100 trials) never collide across seeds.
    std::unordered_set<std::uint64_t> seen;
    std::size_t total = 0;
    for (std::uint64_t base = 1; base <= 100; ++base) {
        for (std::uint64_t t = 0; t < 100; ++t) {
            CounterRng rng(seed_for_trial(base, t));
            seen.insert(rng());
            ++total;
        }
    }
    CHECK(seen.size() == total);
}

TEST_CASE("counter streams are deterministic and position independent") {
    CounterRng a(42), b(42), c(43);
    std::vector<std::uint64_t> xa, xb, xc;
    for (int i = 0; i < 1000; ++i) {
        xa.push_back(a());
        xb.push_back(b());
        xc.push_back(c());
    }
    CHECK(xa == xb);
    CHECK(xa != xc);

    CounterRng u(7);
    for (int i = 0; i < 100000; ++i) {
        const double x = u.uniform();
        REQUIRE(x >= 0.0);
        REQUIRE(x < 1.0);
    }
}

TEST_CASE("signs are fair") {
    CounterRng rng(2024);
    const int t = 1'000'000;
    long plus = 0;
    for (int i = 0; i < t; ++i) plus += rng.sign() > 0;
    // 99% band 3 / (2 sqrt T) around 1/2
    CHECK(std::abs(static_cast<double>(plus) / t - 0.5) < 3.0 / (2.0 * std::sqrt(static_cast<double>(t))));
}

TEST_CASE("sample_potential") {
    const auto a = model::sample_potential(5, 99);
    const auto b = model::sample_potential(5, 99);
    CHECK(a.values == b.values);
    CHECK(a.seed == 99);

    const auto one = model::sample_potential(1, 12345);
    REQUIRE(one.size() == 1);
    CHECK((one.at(1) == 1 || one.at(1) == -1));

    const auto big = model::sample_potential(1'000'000, 3);
    long sum = 0;
    for (auto v : big.values) {
        REQUIRE((v == 1 || v == -1));
        sum += v;
    }
    CHECK(std::abs(static_cast<double>(sum) / 1e6) < 0.005);

    CHECK_THROWS_AS(model::sample_potential(0, 1), InvalidArgument);
}

TEST_CASE("empirical +1 frequency stays in the 99% band") {
    // Each stream falls outside 3 / (2 sqrt T) with probability ~1%; out of
    // 100 streams more than 4 misses has probability below 0.4%.
    const std::size_t t = 4000;
    const double band = 3.0 / (2.0 * std::sqrt(static_cast<double>(t)));
    int outside = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        const auto p = model::sample_potential(t, seed_for_trial(77, s));
        const auto plus = std::count(p.values.begin(), p.values.end(), 1);
        outside += std::abs(static_cast<double>(plus) / t - 0.5) >= band;
    }
    CHECK(outside <= 4);
}
