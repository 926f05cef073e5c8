#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>

#include "vizpref/cluster.hpp"
#include "vizpref/synth.hpp"

using namespace vizpref;

TEST_CASE("generate_synthetic is deterministic per seed") {
    SynthConfig cfg;
    cfg.n_users = 6;
    cfg.images_per_user = 20;
    cfg.seed = 12;
    const auto a = generate_synthetic(cfg);
    const auto b = generate_synthetic(cfg);
    CHECK(a.corpus == b.corpus);
    CHECK(synth_truth_to_json(a.truth) == synth_truth_to_json(b.truth));
    cfg.seed = 13;
    CHECK_FALSE(generate_synthetic(cfg).corpus == a.corpus);
}

TEST_CASE("generate_synthetic shape, ids and separation") {
    SynthConfig cfg;
    cfg.n_users = 5;
    cfg.images_per_user = 7;
    cfg.n_latent_clusters = 12;
    cfg.feature_dim = 3;
    cfg.cluster_separation = 4.0;
    cfg.n_groups = 2;
    const auto r = generate_synthetic(cfg);
    CHECK(r.corpus.user_count() == 5);
    CHECK(r.corpus.record_count() == 35);
    CHECK(r.corpus.feature_dim() == 3);
    CHECK(r.corpus.user_ids().front() == "u00000");
    CHECK(r.truth.user_group.at("u00002") == 0);
    CHECK(r.truth.user_preferences.at("u00000") == r.truth.user_preferences.at("u00004"));
    const auto& centers = r.truth.cluster_centers;
    for (std::size_t i = 0; i < centers.size(); ++i) {
        for (std::size_t j = i + 1; j < centers.size(); ++j) {
            CHECK(euclidean_distance(centers[i], centers[j]) >= 4.0);
        }
    }
    for (const auto& [id, seq] : r.corpus.users()) {
        for (std::size_t i = 0; i < seq.size(); ++i) {
            CHECK(seq[i].timestamp == static_cast<std::int64_t>(i));
            CHECK(seq[i].label == "c" + std::to_string(r.truth.image_latent.at(seq[i].image_id)));
        }
    }

    cfg.label_mode = LabelMode::none;
    CHECK_FALSE(generate_synthetic(cfg).corpus.records().front().label.has_value());
    CHECK(parse_label_mode("none") == LabelMode::none);
    CHECK_THROWS_AS(parse_label_mode("sometimes"), DataError);
    cfg.n_users = 0;
    CHECK_THROWS_AS(generate_synthetic(cfg), DataError);
}

TEST_CASE("small concentration gives concentrated preferences") {
    SynthConfig cfg;
    cfg.n_users = 40;
    cfg.images_per_user = 1;
    cfg.n_groups = 40;
    cfg.dirichlet_concentration = 0.05;
    const auto r = generate_synthetic(cfg);
    std::size_t peaked = 0;
    for (const auto& [id, p] : r.truth.user_preferences) {
        if (*std::max_element(p.begin(), p.end()) > 0.5) {
            ++peaked;
        }
    }
    CHECK(peaked >= 36);
}

TEST_CASE("well-separated latent clusters are recovered by k-means") {
    SynthConfig cfg;
    cfg.n_users = 20;
    cfg.images_per_user = 40;
    cfg.n_latent_clusters = 6;
    cfg.feature_dim = 4;
    cfg.cluster_separation = 8.0;
    cfg.noise_stddev = 0.5;
    cfg.n_groups = 20;
    cfg.dirichlet_concentration = 2.0;
    cfg.seed = 3;
    const auto r = generate_synthetic(cfg);
    const auto records = r.corpus.records();
    std::vector<Vector> feats;
    for (const auto& rec : records) {
        feats.push_back(rec.features);
    }
    const auto fit = kmeans_fit(feats, 6, 9);
    std::vector<std::map<std::size_t, std::size_t>> votes(6);
    for (std::size_t i = 0; i < records.size(); ++i) {
        ++votes[fit.assignment[i]][r.truth.image_latent.at(records[i].image_id)];
    }
    std::size_t majority = 0;
    for (const auto& v : votes) {
        std::size_t best = 0;
        for (const auto& [latent, n] : v) {
            best = std::max(best, n);
        }
        majority += best;
    }
    CHECK(static_cast<double>(majority) / static_cast<double>(records.size()) > 0.9);
}
