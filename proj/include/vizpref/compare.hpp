#ifndef VIZPREF_COMPARE_HPP
#define VIZPREF_COMPARE_HPP

#include <string>
#include <utility>
#include <vector>

#include "vizpref/common.hpp"
#include "vizpref/profile.hpp"

namespace vizpref {

// Scale of the informative Dirichlet prior: pseudo-counts are
// prior_scale * background counts.
struct PriorConfig {
    double prior_scale = 1.0;

    // Scale giving the prior `total_mass` pseudo-counts overall.
    static PriorConfig with_total_mass(const BackgroundDistribution& bg, double total_mass = 100.0);
};

inline constexpr double kDefaultPriorMass = 100.0;

// |z| at or above this marks a per-cluster difference significant at the
// 95% level.
inline constexpr double kSignificantZ = 2.0;

struct PairStats {
    std::string user_i;
    std::string user_j;
    Vector delta;
    Vector variance;
    Vector z;
    double z_max = 0.0;
    std::size_t argmax_cluster = 0;
};

// Per-cluster log-odds difference under the smoothed counts
// y(k) = counts(k) + a*bg(k), with odds y(k) / (T - y(k)) and
// T = sum(counts) + a*sum(bg).
Vector log_odds_delta(const Vector& counts_i, const Vector& counts_j, const BackgroundDistribution& bg,
                      const PriorConfig& prior);

// 1/y_i(k) + 1/y_j(k).
Vector delta_variance(const Vector& counts_i, const Vector& counts_j, const BackgroundDistribution& bg,
                      const PriorConfig& prior);

Vector z_scores(const Vector& delta, const Vector& variance);

// max_k |z_k|.
double pairwise_max_z(const Vector& z);

PairStats pair_stats(const UserProfile& a, const UserProfile& b, const BackgroundDistribution& bg,
                     const PriorConfig& prior);

// One entry per unordered pair, ordered by (user_i, user_j) with
// user_i < user_j.
std::vector<PairStats> all_pairs_stats(const std::vector<UserProfile>& profiles, const BackgroundDistribution& bg,
                                       const PriorConfig& prior);

struct EcdfStep {
    double value = 0.0;
    double fraction = 0.0;
};

// Distinct values ascending, each with the fraction of inputs <= it.
std::vector<EcdfStep> ecdf(std::vector<double> values);

// CSV user_i,user_j,z_max,argmax_cluster (cluster index is 1-based).
std::string pair_stats_to_csv(const std::vector<PairStats>& stats);
std::string ecdf_to_csv(const std::vector<EcdfStep>& steps);

}  // namespace vizpref

#endif  // VIZPREF_COMPARE_HPP
