#ifndef VIZPREF_PROFILE_HPP
#define VIZPREF_PROFILE_HPP

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "vizpref/cluster.hpp"
#include "vizpref/common.hpp"
#include "vizpref/corpus.hpp"

namespace vizpref {

// Per-user distribution over visual clusters.
struct UserProfile {
    std::string user_id;
    Vector raw_counts;
    Vector normalized;
    double mass = 0.0;
    // Set when every assignment was zero and the uniform fallback was used.
    bool degenerate = false;

    std::size_t k() const { return normalized.size(); }
};

// Sum of assignment vectors, L1-normalized. Zero total mass falls back to the
// uniform distribution with `degenerate` set.
UserProfile build_profile(const std::string& user_id, const std::vector<Vector>& assignments);

// Unnormalized sum of the background corpus's assignment vectors.
struct BackgroundDistribution {
    Vector counts;

    std::size_t k() const { return counts.size(); }
    double total() const;
};

BackgroundDistribution background_distribution(const std::vector<Vector>& assignments);

// Soft-assigns each record's (already embedded) features.
std::vector<Vector> assign_records(const std::vector<ImageRecord>& records, const ClusterModel& model);

// One profile per user, in user-id order.
std::vector<UserProfile> build_profiles(const UserCorpus& embedded, const ClusterModel& model);

// CSV: user_id,Z,degenerate_flag,v1..vK. `header_comment` becomes a '# ' line.
void write_profiles_csv(const std::vector<UserProfile>& profiles, const std::filesystem::path& path,
                        const std::string& header_comment = {});
std::string profiles_to_csv(const std::vector<UserProfile>& profiles);
std::vector<UserProfile> parse_profiles_csv(const std::string& text);
std::vector<UserProfile> load_profiles_csv(const std::filesystem::path& path);

nlohmann::json background_to_json(const BackgroundDistribution& bg);
BackgroundDistribution background_from_json(const nlohmann::json& j);
void save_background(const BackgroundDistribution& bg, const std::filesystem::path& path,
                     const nlohmann::json& meta = nlohmann::json::object());
BackgroundDistribution load_background(const std::filesystem::path& path);

}  // namespace vizpref

#endif  // VIZPREF_PROFILE_HPP
