#include "vizpref/synth.hpp"

#include <cmath>
#include <cstdio>

namespace vizpref {

void SynthConfig::validate() const {
    if (n_users == 0 || images_per_user == 0 || n_latent_clusters == 0 || feature_dim == 0 || n_groups == 0) {
        throw DataError("synthetic config counts must be positive");
    }
    if (!(cluster_separation > 0.0)) {
        throw DataError("cluster separation must be positive");
    }
    if (!(noise_stddev >= 0.0) || !(dirichlet_concentration > 0.0)) {
        throw DataError("noise must be nonnegative and concentration positive");
    }
}

LabelMode parse_label_mode(const std::string& name) {
    if (name == "latent_cluster_as_label" || name == "latent") {
        return LabelMode::latent_cluster_as_label;
    }
    if (name == "none") {
        return LabelMode::none;
    }
    throw DataError("unknown label mode '" + name + "'");
}

namespace {

// Rejection sampling in a cube that widens whenever placement stalls.
std::vector<Vector> place_centers(const SynthConfig& config, Rng& rng) {
    const double sep_sq = config.cluster_separation * config.cluster_separation;
    double half_width = config.cluster_separation *
                        std::max(1.0, std::pow(static_cast<double>(config.n_latent_clusters),
                                               1.0 / static_cast<double>(config.feature_dim)));
    std::vector<Vector> centers;
    std::size_t failures = 0;
    while (centers.size() < config.n_latent_clusters) {
        Vector c(config.feature_dim);
        for (auto& x : c) {
            x = (2.0 * rng.uniform() - 1.0) * half_width;
        }
        bool ok = true;
        for (const auto& other : centers) {
            if (squared_distance(c, other) < sep_sq) {
                ok = false;
                break;
            }
        }
        if (ok) {
            centers.push_back(std::move(c));
            failures = 0;
        } else if (++failures > 1000) {
            half_width *= 1.5;
            failures = 0;
        }
    }
    return centers;
}

std::size_t sample_categorical(const Vector& p, Rng& rng) {
    const double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        acc += p[i];
        if (u < acc) {
            return i;
        }
    }
    return p.size() - 1;
}

std::string padded(const char* prefix, std::size_t n) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%05zu", prefix, n);
    return buf;
}

}  // namespace

SynthResult generate_synthetic(const SynthConfig& config) {
    config.validate();
    Rng rng(config.seed);
    SynthResult result;
    result.truth.cluster_centers = place_centers(config, rng);

    std::vector<Vector> group_prefs;
    group_prefs.reserve(config.n_groups);
    for (std::size_t g = 0; g < config.n_groups; ++g) {
        group_prefs.push_back(rng.dirichlet(config.n_latent_clusters, config.dirichlet_concentration));
    }

    std::vector<ImageRecord> records;
    records.reserve(config.n_users * config.images_per_user);
    for (std::size_t u = 0; u < config.n_users; ++u) {
        const std::string user_id = padded("u", u);
        const std::size_t group = u % config.n_groups;
        const Vector& pref = group_prefs[group];
        result.truth.user_preferences[user_id] = pref;
        result.truth.user_group[user_id] = group;
        for (std::size_t j = 0; j < config.images_per_user; ++j) {
            const std::size_t latent = sample_categorical(pref, rng);
            ImageRecord r;
            r.user_id = user_id;
            r.image_id = user_id + "-" + padded("i", j);
            r.timestamp = static_cast<std::int64_t>(j);
            if (config.label_mode == LabelMode::latent_cluster_as_label) {
                r.label = "c" + std::to_string(latent);
            }
            r.features.resize(config.feature_dim);
            const auto& center = result.truth.cluster_centers[latent];
            for (std::size_t d = 0; d < config.feature_dim; ++d) {
                r.features[d] = center[d] + rng.normal(0.0, config.noise_stddev);
            }
            result.truth.image_latent[r.image_id] = latent;
            records.push_back(std::move(r));
        }
    }
    result.corpus = UserCorpus::from_records(std::move(records));
    return result;
}

nlohmann::json synth_truth_to_json(const SynthTruth& truth) {
    nlohmann::json j;
    j["cluster_centers"] = truth.cluster_centers;
    j["user_preferences"] = truth.user_preferences;
    j["user_group"] = truth.user_group;
    j["image_latent"] = truth.image_latent;
    return j;
}

}  // namespace vizpref
