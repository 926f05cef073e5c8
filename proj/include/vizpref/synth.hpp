#ifndef VIZPREF_SYNTH_HPP
#define VIZPREF_SYNTH_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "vizpref/common.hpp"
#include "vizpref/corpus.hpp"

namespace vizpref {

enum class LabelMode { latent_cluster_as_label, none };

// Ground-truth generator settings. Users are assigned round-robin to
// n_groups groups; every user in a group shares one preference vector.
struct SynthConfig {
    std::size_t n_users = 60;
    std::size_t images_per_user = 100;
    std::size_t n_latent_clusters = 8;
    std::size_t feature_dim = 8;
    double cluster_separation = 6.0;
    double noise_stddev = 1.0;
    double dirichlet_concentration = 0.5;
    std::size_t n_groups = 60;
    LabelMode label_mode = LabelMode::latent_cluster_as_label;
    std::uint64_t seed = 0;

    void validate() const;
};

struct SynthTruth {
    std::vector<Vector> cluster_centers;
    std::map<std::string, Vector> user_preferences;
    std::map<std::string, std::size_t> user_group;
    // Keyed by image id (unique across the corpus).
    std::map<std::string, std::size_t> image_latent;
};

struct SynthResult {
    UserCorpus corpus;
    SynthTruth truth;
};

// Cluster centers at pairwise distance >= separation, per-user Dirichlet
// preferences, Gaussian features around the sampled cluster's center.
// Timestamps are consecutive integers per user.
SynthResult generate_synthetic(const SynthConfig& config);

LabelMode parse_label_mode(const std::string& name);

nlohmann::json synth_truth_to_json(const SynthTruth& truth);

}  // namespace vizpref

#endif  // VIZPREF_SYNTH_HPP
