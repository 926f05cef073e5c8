#ifndef VIZPREF_CLUSTER_HPP
#define VIZPREF_CLUSTER_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <json.hpp>

#include "vizpref/common.hpp"

namespace vizpref {

// K visual cluster centers plus the Gaussian-kernel bandwidth (alpha^2)
// and hard distance cutoff used for soft assignment.
struct ClusterModel {
    std::vector<Vector> centers;
    double bandwidth_sq = 1.0;
    double cutoff = 1.0;
    std::uint64_t seed = 0;

    std::size_t k() const { return centers.size(); }
    std::size_t dim() const { return centers.empty() ? 0 : centers.front().size(); }

    void validate() const;

    friend bool operator==(const ClusterModel&, const ClusterModel&) = default;
};

struct KMeansResult {
    std::vector<Vector> centers;
    std::vector<std::size_t> assignment;
    // Inertia after each assignment step, first entry after initialization.
    std::vector<double> inertia_history;
    std::size_t iterations = 0;
    bool converged = false;

    double inertia() const { return inertia_history.empty() ? 0.0 : inertia_history.back(); }
};

inline constexpr std::size_t kDefaultKMeansIterations = 300;

// Lloyd's algorithm from a seeded k-means++ start. Stops at an assignment
// fixpoint or after max_iter update rounds. An emptied cluster is refilled
// with the point farthest from its current center; distance ties go to the
// lowest center index.
KMeansResult kmeans_fit(const std::vector<Vector>& features, std::size_t k, std::uint64_t seed,
                        std::size_t max_iter = kDefaultKMeansIterations);

// Mean squared distance over all ordered pairs (i == j included), via
// (2/n) sum |d_i|^2 - 2 |mean|^2. Throws NumericError when every point is
// identical.
double estimate_bandwidth(const std::vector<Vector>& background_features);

// c(k) = exp(-|d - r_k|^2 / (2 alpha^2)) when |d - r_k| <= cutoff, else 0.
Vector soft_assign(std::span<const double> embedded, const ClusterModel& model);

ClusterModel make_cluster_model(std::vector<Vector> centers, double bandwidth_sq, double cutoff, std::uint64_t seed);

inline constexpr int kClusterModelVersion = 1;

nlohmann::json cluster_model_to_json(const ClusterModel& model);
ClusterModel cluster_model_from_json(const nlohmann::json& j);

void save_cluster_model(const ClusterModel& model, const std::filesystem::path& path,
                        const nlohmann::json& meta = nlohmann::json::object());
ClusterModel load_cluster_model(const std::filesystem::path& path, nlohmann::json* raw = nullptr);

}  // namespace vizpref

#endif  // VIZPREF_CLUSTER_HPP
