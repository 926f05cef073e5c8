#include "vizpref/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace vizpref {

using json = nlohmann::json;

void ClusterModel::validate() const {
    if (centers.empty()) {
        throw DataError("cluster model needs at least one center");
    }
    const std::size_t d = centers.front().size();
    for (const auto& c : centers) {
        if (c.size() != d) {
            throw DataError("cluster centers differ in dimension");
        }
    }
    if (!(bandwidth_sq > 0.0) || !std::isfinite(bandwidth_sq)) {
        throw NumericError("bandwidth must be positive and finite");
    }
    if (!(cutoff > 0.0)) {
        throw DataError("cutoff must be positive");
    }
}

ClusterModel make_cluster_model(std::vector<Vector> centers, double bandwidth_sq, double cutoff, std::uint64_t seed) {
    ClusterModel model{std::move(centers), bandwidth_sq, cutoff, seed};
    model.validate();
    return model;
}

namespace {

struct Nearest {
    std::size_t index = 0;
    double dist_sq = 0.0;
};

Nearest nearest_center(std::span<const double> x, const std::vector<Vector>& centers) {
    Nearest best{0, std::numeric_limits<double>::infinity()};
    for (std::size_t c = 0; c < centers.size(); ++c) {
        const double d = squared_distance(x, centers[c]);
        if (d < best.dist_sq) {
            best = {c, d};
        }
    }
    return best;
}

std::vector<Vector> kmeanspp_init(const std::vector<Vector>& points, std::size_t k, Rng& rng) {
    std::vector<Vector> centers;
    centers.reserve(k);
    centers.push_back(points[rng.index(points.size())]);
    std::vector<double> dist_sq(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        dist_sq[i] = squared_distance(points[i], centers.front());
    }
    while (centers.size() < k) {
        double total = 0.0;
        for (const double d : dist_sq) {
            total += d;
        }
        std::size_t pick = 0;
        if (total > 0.0) {
            const double u = rng.uniform() * total;
            double acc = 0.0;
            pick = points.size() - 1;
            for (std::size_t i = 0; i < points.size(); ++i) {
                acc += dist_sq[i];
                if (u < acc && dist_sq[i] > 0.0) {
                    pick = i;
                    break;
                }
            }
        } else {
            // Every point coincides with a chosen center.
            pick = rng.index(points.size());
        }
        centers.push_back(points[pick]);
        for (std::size_t i = 0; i < points.size(); ++i) {
            dist_sq[i] = std::min(dist_sq[i], squared_distance(points[i], centers.back()));
        }
    }
    return centers;
}

double assign_points(const std::vector<Vector>& points, const std::vector<Vector>& centers,
                     std::vector<std::size_t>& labels) {
    std::vector<double> costs(points.size());
    parallel_for(points.size(), 0, [&](std::size_t i) {
        const auto best = nearest_center(points[i], centers);
        labels[i] = best.index;
        costs[i] = best.dist_sq;
    });
    double inertia = 0.0;
    for (const double c : costs) {
        inertia += c;
    }
    return inertia;
}

void recompute_means(const std::vector<Vector>& points, const std::vector<std::size_t>& labels,
                     std::vector<Vector>& centers, std::vector<std::size_t>& counts) {
    const std::size_t dim = points.front().size();
    counts.assign(centers.size(), 0);
    std::vector<Vector> sums(centers.size(), Vector(dim, 0.0));
    for (std::size_t i = 0; i < points.size(); ++i) {
        ++counts[labels[i]];
        for (std::size_t d = 0; d < dim; ++d) {
            sums[labels[i]][d] += points[i][d];
        }
    }
    for (std::size_t c = 0; c < centers.size(); ++c) {
        if (counts[c] == 0) {
            continue;
        }
        for (std::size_t d = 0; d < dim; ++d) {
            centers[c][d] = sums[c][d] / static_cast<double>(counts[c]);
        }
    }
}

}  // namespace

KMeansResult kmeans_fit(const std::vector<Vector>& features, std::size_t k, std::uint64_t seed, std::size_t max_iter) {
    if (k == 0) {
        throw DataError("k must be positive");
    }
    if (features.size() < k) {
        throw DataError("k-means needs at least k=" + std::to_string(k) + " points, got " +
                        std::to_string(features.size()));
    }
    const std::size_t dim = features.front().size();
    for (const auto& x : features) {
        if (x.size() != dim) {
            throw DataError("k-means input vectors differ in dimension");
        }
    }

    Rng rng(seed);
    KMeansResult result;
    result.centers = kmeanspp_init(features, k, rng);
    result.assignment.assign(features.size(), 0);
    result.inertia_history.push_back(assign_points(features, result.centers, result.assignment));

    std::vector<std::size_t> counts;
    std::vector<std::size_t> labels(features.size());
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        recompute_means(features, result.assignment, result.centers, counts);
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] != 0) {
                continue;
            }
            // Steal the worst-served point from a cluster that can spare it.
            std::size_t worst = features.size();
            double worst_dist = -1.0;
            for (std::size_t i = 0; i < features.size(); ++i) {
                const std::size_t owner = result.assignment[i];
                if (counts[owner] < 2) {
                    continue;
                }
                const double d = squared_distance(features[i], result.centers[owner]);
                if (d > worst_dist) {
                    worst_dist = d;
                    worst = i;
                }
            }
            if (worst == features.size()) {
                break;
            }
            result.centers[c] = features[worst];
            result.assignment[worst] = c;
            recompute_means(features, result.assignment, result.centers, counts);
        }
        ++result.iterations;

        const double inertia = assign_points(features, result.centers, labels);
        result.inertia_history.push_back(inertia);
        const bool changed = labels != result.assignment;
        result.assignment = labels;
        if (!changed) {
            result.converged = true;
            break;
        }
    }
    return result;
}

double estimate_bandwidth(const std::vector<Vector>& background_features) {
    if (background_features.size() < 2) {
        throw NumericError("bandwidth estimation needs at least two vectors");
    }
    const std::size_t dim = background_features.front().size();
    bool distinct = false;
    for (const auto& x : background_features) {
        if (x.size() != dim) {
            throw DataError("bandwidth input vectors differ in dimension");
        }
        distinct = distinct || x != background_features.front();
    }
    if (!distinct) {
        throw NumericError("all background vectors are identical; bandwidth would be zero");
    }
    const double n = static_cast<double>(background_features.size());
    double sum_norm_sq = 0.0;
    Vector mean(dim, 0.0);
    for (const auto& x : background_features) {
        for (std::size_t d = 0; d < dim; ++d) {
            sum_norm_sq += x[d] * x[d];
            mean[d] += x[d];
        }
    }
    double mean_norm_sq = 0.0;
    for (auto& m : mean) {
        m /= n;
        mean_norm_sq += m * m;
    }
    const double alpha_sq = 2.0 * sum_norm_sq / n - 2.0 * mean_norm_sq;
    if (!(alpha_sq > 0.0)) {
        throw NumericError("bandwidth underflowed to " + format_double(alpha_sq));
    }
    return alpha_sq;
}

Vector soft_assign(std::span<const double> embedded, const ClusterModel& model) {
    if (embedded.size() != model.dim()) {
        throw DataError("embedded vector has dimension " + std::to_string(embedded.size()) + ", centers have " +
                        std::to_string(model.dim()));
    }
    Vector weights(model.k(), 0.0);
    for (std::size_t c = 0; c < model.k(); ++c) {
        const double d_sq = squared_distance(embedded, model.centers[c]);
        if (std::sqrt(d_sq) <= model.cutoff) {
            weights[c] = std::exp(-d_sq / (2.0 * model.bandwidth_sq));
        }
    }
    return weights;
}

json cluster_model_to_json(const ClusterModel& model) {
    return {{"version", kClusterModelVersion}, {"k", model.k()},
            {"dim", model.dim()},              {"centers", model.centers},
            {"bandwidth_sq", model.bandwidth_sq}, {"cutoff", model.cutoff},
            {"seed", model.seed}};
}

ClusterModel cluster_model_from_json(const json& j) {
    try {
        const int version = j.at("version").get<int>();
        if (version != kClusterModelVersion) {
            throw DataError("unsupported cluster model version " + std::to_string(version));
        }
        ClusterModel model;
        model.centers = j.at("centers").get<std::vector<Vector>>();
        model.bandwidth_sq = j.at("bandwidth_sq").get<double>();
        model.cutoff = j.at("cutoff").get<double>();
        model.seed = j.at("seed").get<std::uint64_t>();
        if (j.at("k").get<std::size_t>() != model.k() || j.at("dim").get<std::size_t>() != model.dim()) {
            throw DataError("cluster model k/dim fields disagree with the centers");
        }
        model.validate();
        return model;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed cluster model: ") + e.what());
    }
}

void save_cluster_model(const ClusterModel& model, const std::filesystem::path& path, const json& meta) {
    json j = cluster_model_to_json(model);
    for (const auto& [key, value] : meta.items()) {
        j[key] = value;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    out << j.dump(1) << '\n';
}

ClusterModel load_cluster_model(const std::filesystem::path& path, json* raw) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open cluster model " + path.string());
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError("cluster model " + path.string() + ": " + e.what());
    }
    if (raw != nullptr) {
        *raw = j;
    }
    return cluster_model_from_json(j);
}

}  // namespace vizpref
