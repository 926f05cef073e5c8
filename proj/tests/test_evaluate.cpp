#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "vizpref/evaluate.hpp"
#include "vizpref/oracle.hpp"

using namespace vizpref;

namespace {

UserProfile point(const std::string& id, Vector v) {
    UserProfile p;
    p.user_id = id;
    p.normalized = std::move(v);
    p.raw_counts = p.normalized;
    p.mass = 1.0;
    return p;
}

}  // namespace

TEST_CASE("rank_candidates: closest, middle and tied") {
    const auto q = point("q", {0.0, 0.0});
    const std::vector<UserProfile> cands{point("a", {1.0, 0.0}), point("b", {2.0, 0.0}), point("c", {3.0, 0.0})};
    CHECK(rank_candidates(q, cands, "a").rank == 1);
    CHECK(rank_candidates(q, cands, "b").rank == 2);
    CHECK(rank_candidates(q, cands, "c").reciprocal == doctest::Approx(1.0 / 3.0));

    // Ties count against the true candidate.
    const std::vector<UserProfile> tied{point("a", {1.0, 0.0}), point("b", {0.0, 1.0}), point("c", {-1.0, 0.0})};
    CHECK(rank_candidates(q, tied, "a").rank == 3);
    CHECK(rank_candidates(q, tied, "b").rank == 3);

    CHECK_THROWS_AS(rank_candidates(q, cands, "zzz"), DataError);
}

TEST_CASE("mrr examples") {
    std::vector<RankingOutcome> all_first(5);
    CHECK(mrr(all_first) == 1.0);

    std::vector<RankingOutcome> mixed;
    for (const std::size_t r : {1, 2, 4}) {
        mixed.push_back({"u", r, 1.0 / static_cast<double>(r)});
    }
    CHECK(mrr(mixed) == doctest::Approx(0.5833333333333334).epsilon(1e-15));
    CHECK(oracle::mrr({1, 2, 4}) == doctest::Approx(0.5833333333333334).epsilon(1e-15));
    CHECK_THROWS_AS(mrr({}), DataError);
}

TEST_CASE("random baseline is H_N / N") {
    CHECK(random_mrr_baseline(1) == 1.0);
    CHECK(random_mrr_baseline(100) == doctest::Approx(0.05187377517639620).epsilon(1e-14));
    CHECK(random_mrr_baseline(60) == doctest::Approx(0.07799784021586230).epsilon(1e-14));

    // Monte Carlo: uniformly random rank of the truth among 100.
    Rng rng(17);
    double sum = 0.0;
    const int trials = 200000;
    for (int t = 0; t < trials; ++t) {
        sum += 1.0 / static_cast<double>(1 + rng.index(100));
    }
    CHECK(std::abs(sum / trials - random_mrr_baseline(100)) < 0.002);
}

TEST_CASE("average_precision examples") {
    std::vector<LabeledEmbedding> items{
        {"q", "A", {0.0}}, {"x", "B", {1.0}}, {"y", "A", {2.0}}, {"z", "C", {3.0}}};
    CHECK(*average_precision(0, items) == doctest::Approx(0.5));

    std::vector<LabeledEmbedding> perfect{{"q", "A", {0.0}}, {"a", "A", {1.0}}, {"b", "A", {1.5}}, {"c", "B", {9.0}}};
    CHECK(*average_precision(0, perfect) == 1.0);
    CHECK_FALSE(average_precision(3, perfect).has_value());

    const auto report = mean_average_precision(perfect);
    CHECK(report.excluded == std::vector<std::string>{"c"});
    CHECK(report.per_query.size() == 3);
    CHECK(map_report_to_csv(report).find("mean,") != std::string::npos);

    const std::vector<LabeledEmbedding> one_label{{"a", "A", {0.0}}, {"b", "A", {1.0}}};
    CHECK_THROWS_AS(mean_average_precision(one_label), DataError);
}

TEST_CASE("average_precision matches the re-sorting oracle") {
    Rng rng(8);
    for (int t = 0; t < 20; ++t) {
        std::vector<LabeledEmbedding> items;
        std::vector<Vector> xs;
        std::vector<std::string> labels;
        std::vector<std::string> ids;
        for (int i = 0; i < 40; ++i) {
            LabeledEmbedding item{"i" + std::to_string(i), "L" + std::to_string(rng.index(4)),
                                  {std::round(rng.normal() * 3.0), rng.normal()}};
            items.push_back(item);
        }
        const std::size_t q = rng.index(items.size());
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (i != q) {
                xs.push_back(items[i].x);
                labels.push_back(items[i].label);
                ids.push_back(items[i].id);
            }
        }
        const double expected = oracle::average_precision(items[q].x, items[q].label, xs, labels, ids);
        const auto got = average_precision(q, items);
        if (expected < 0.0) {
            CHECK_FALSE(got.has_value());
        } else {
            REQUIRE(got.has_value());
            CHECK(std::abs(*got - expected) < 1e-9);
        }
    }
}

TEST_CASE("prediction task: disjoint users are always found") {
    // Every user lives on its own cluster, so query and test profiles coincide.
    std::vector<Vector> centers;
    std::vector<ImageRecord> records;
    for (int u = 0; u < 6; ++u) {
        const Vector c{10.0 * u, 0.0};
        centers.push_back(c);
        for (int i = 0; i < 30; ++i) {
            records.push_back({"u" + std::to_string(u), "i" + std::to_string(i), i, std::nullopt, c});
        }
    }
    // Too short for the split.
    records.push_back({"short", "only", 0, std::nullopt, {0.0, 0.0}});
    const auto corpus = UserCorpus::from_records(records);
    const auto model = make_cluster_model(centers, 1.0, 1.0, 0);
    const auto report = run_prediction_task(corpus, SplitSpec{20, 10, 10, 1}, FeatureEmbedding{}, model, {1, 5, 10});
    REQUIRE(report.rows.size() == 3);
    for (const auto& row : report.rows) {
        CHECK(row.mrr == 1.0);
        CHECK(row.n_users == 6);
        CHECK(row.random_baseline == doctest::Approx(random_mrr_baseline(6)));
    }
    REQUIRE(report.excluded.size() == 1);
    CHECK(report.excluded[0].first == "short");
    CHECK(prediction_to_csv(report).rfind("train_size,mrr,random_baseline\n1,1,", 0) == 0);

    CHECK_THROWS_AS(run_prediction_task(corpus, SplitSpec{20, 10, 10, 1}, FeatureEmbedding{}, model, {}), DataError);
    CHECK_THROWS_AS(run_prediction_task(corpus, SplitSpec{20, 10, 10, 1}, FeatureEmbedding{}, model, {11}), DataError);
}
