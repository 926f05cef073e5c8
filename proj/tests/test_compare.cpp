#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "vizpref/compare.hpp"
#include "vizpref/oracle.hpp"

using namespace vizpref;

namespace {

UserProfile profile_from_counts(const std::string& id, const Vector& counts) {
    return build_profile(id, {counts});
}

Vector random_counts(std::size_t k, Rng& rng) {
    Vector v(k);
    for (auto& x : v) {
        x = rng.uniform() < 0.2 ? 0.0 : 20.0 * rng.uniform();
    }
    return v;
}

}  // namespace

TEST_CASE("log-odds: two-cluster fixture") {
    const BackgroundDistribution bg{{1.0, 1.0}};
    const PriorConfig prior{1.0};
    const Vector a{8.0, 2.0};
    const Vector b{2.0, 8.0};
    const auto delta = log_odds_delta(a, b, bg, prior);
    CHECK(delta[0] == doctest::Approx(2.1972245773362194).epsilon(1e-14));
    CHECK(delta[1] == doctest::Approx(-2.1972245773362194).epsilon(1e-14));
    const auto var = delta_variance(a, b, bg, prior);
    CHECK(var[0] == doctest::Approx(0.4444444444444444).epsilon(1e-14));
    const auto z = z_scores(delta, var);
    CHECK(z[0] == doctest::Approx(3.295836866004329).epsilon(1e-14));
    CHECK(pairwise_max_z(z) == doctest::Approx(3.295836866004329).epsilon(1e-14));
}

TEST_CASE("log-odds: identical profiles give zero") {
    Rng rng(1);
    const BackgroundDistribution bg{random_counts(6, rng)};
    auto bgp = bg;
    for (auto& x : bgp.counts) {
        x += 1.0;
    }
    const auto c = random_counts(6, rng);
    const auto delta = log_odds_delta(c, c, bgp, PriorConfig{0.5});
    for (const double d : delta) {
        CHECK(d == 0.0);
    }
    const auto stats = pair_stats(profile_from_counts("a", c), profile_from_counts("b", c), bgp, PriorConfig{0.5});
    CHECK(stats.z_max == 0.0);
}

TEST_CASE("log-odds: antisymmetry and symmetric variance") {
    Rng rng(2);
    for (int t = 0; t < 30; ++t) {
        const std::size_t k = 2 + rng.index(12);
        BackgroundDistribution bg{random_counts(k, rng)};
        for (auto& x : bg.counts) {
            x += 0.1;
        }
        const auto a = random_counts(k, rng);
        const auto b = random_counts(k, rng);
        const PriorConfig prior = PriorConfig::with_total_mass(bg);
        const auto ab = log_odds_delta(a, b, bg, prior);
        const auto ba = log_odds_delta(b, a, bg, prior);
        const auto vab = delta_variance(a, b, bg, prior);
        const auto vba = delta_variance(b, a, bg, prior);
        for (std::size_t i = 0; i < k; ++i) {
            CHECK(ab[i] == -ba[i]);
            CHECK(vab[i] == vba[i]);
        }
    }
}

TEST_CASE("log-odds: a stronger prior never increases the largest |delta|") {
    Rng rng(3);
    for (int t = 0; t < 30; ++t) {
        const std::size_t k = 2 + rng.index(8);
        BackgroundDistribution bg{random_counts(k, rng)};
        for (auto& x : bg.counts) {
            x += 0.5;
        }
        const auto a = random_counts(k, rng);
        const auto b = random_counts(k, rng);
        const double alpha = 0.1 + rng.uniform() * 3.0;
        double weak = 0.0;
        double strong = 0.0;
        for (const double d : log_odds_delta(a, b, bg, PriorConfig{alpha})) {
            weak = std::max(weak, std::abs(d));
        }
        for (const double d : log_odds_delta(a, b, bg, PriorConfig{10.0 * alpha})) {
            strong = std::max(strong, std::abs(d));
        }
        CHECK(strong <= weak + 1e-12);
    }
}

TEST_CASE("log-odds: matches the extended-precision transcription") {
    Rng rng(4);
    for (int t = 0; t < 50; ++t) {
        const std::size_t k = 2 + rng.index(16);
        BackgroundDistribution bg{random_counts(k, rng)};
        for (auto& x : bg.counts) {
            x += 0.01;
        }
        const auto a = random_counts(k, rng);
        const auto b = random_counts(k, rng);
        const double scale = 0.05 + rng.uniform() * 5.0;
        const PriorConfig prior{scale};
        const auto delta = log_odds_delta(a, b, bg, prior);
        const auto var = delta_variance(a, b, bg, prior);
        const auto z = z_scores(delta, var);
        const auto od = oracle::log_odds_delta(a, b, bg.counts, scale);
        const auto ov = oracle::variance(a, b, bg.counts, scale);
        const auto oz = oracle::z_scores(a, b, bg.counts, scale);
        for (std::size_t i = 0; i < k; ++i) {
            CHECK(std::abs(delta[i] - od[i]) < 1e-12);
            CHECK(std::abs(var[i] - ov[i]) < 1e-12 * std::max(1.0, ov[i]));
            CHECK(std::abs(z[i] - oz[i]) < 1e-12 * std::max(1.0, std::abs(oz[i])));
        }
    }
}

TEST_CASE("log-odds: input validation") {
    const BackgroundDistribution bg{{1.0, 1.0}};
    CHECK_THROWS_AS(log_odds_delta({1.0}, {1.0, 2.0}, bg, PriorConfig{1.0}), DataError);
    CHECK_THROWS_AS(log_odds_delta({1.0, 2.0}, {1.0, 2.0}, bg, PriorConfig{0.0}), Error);
    CHECK_THROWS_AS(PriorConfig::with_total_mass(BackgroundDistribution{{0.0, 0.0}}), NumericError);
    CHECK(PriorConfig::with_total_mass(BackgroundDistribution{{30.0, 20.0}}).prior_scale == doctest::Approx(2.0));
}

TEST_CASE("all_pairs_stats ordering and CSV") {
    Rng rng(5);
    std::vector<UserProfile> profiles;
    for (const char* id : {"d", "b", "a", "c"}) {
        profiles.push_back(profile_from_counts(id, random_counts(3, rng)));
    }
    const BackgroundDistribution bg{{5.0, 5.0, 5.0}};
    const auto stats = all_pairs_stats(profiles, bg, PriorConfig{1.0});
    REQUIRE(stats.size() == 6);
    CHECK(stats[0].user_i == "a");
    CHECK(stats[0].user_j == "b");
    CHECK(stats[5].user_i == "c");
    CHECK(stats[5].user_j == "d");
    for (const auto& s : stats) {
        CHECK(s.user_i < s.user_j);
        CHECK(std::abs(s.z[s.argmax_cluster]) == s.z_max);
    }
    const auto csv = pair_stats_to_csv(stats);
    CHECK(csv.rfind("user_i,user_j,z_max,argmax_cluster\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
}

TEST_CASE("ecdf") {
    const auto steps = ecdf({3.0, 1.0, 2.0, 1.0});
    REQUIRE(steps.size() == 3);
    CHECK(steps[0].value == 1.0);
    CHECK(steps[0].fraction == 0.5);
    CHECK(steps[2].fraction == 1.0);
    CHECK_THROWS_AS(ecdf({}), DataError);
    CHECK(ecdf_to_csv(steps).rfind("value,fraction\n", 0) == 0);
}
