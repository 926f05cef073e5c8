#ifndef VIZPREF_EVALUATE_HPP
#define VIZPREF_EVALUATE_HPP

#include <optional>
#include <string>
#include <vector>

#include "vizpref/cluster.hpp"
#include "vizpref/common.hpp"
#include "vizpref/corpus.hpp"
#include "vizpref/metric.hpp"
#include "vizpref/profile.hpp"

namespace vizpref {

struct RankingOutcome {
    std::string user_id;
    std::size_t rank = 1;
    double reciprocal = 1.0;
};

// Ranks `candidates` by Euclidean distance between normalized profiles and
// reports where `true_id` lands. Ties count against the true candidate, so
// rank = 1 + #closer + #tied others.
RankingOutcome rank_candidates(const UserProfile& query, const std::vector<UserProfile>& candidates,
                               const std::string& true_id);

double mrr(const std::vector<RankingOutcome>& outcomes);

// H_n / n: expected reciprocal rank of a uniformly random ranking.
double random_mrr_baseline(std::size_t n_candidates);

struct PredictionRow {
    std::size_t train_size = 0;
    double mrr = 0.0;
    double random_baseline = 0.0;
    std::size_t n_users = 0;
};

struct PredictionReport {
    std::vector<PredictionRow> rows;
    // (user_id, reason) for users left out of the task.
    std::vector<std::pair<std::string, std::string>> excluded;
};

// Board-retrieval task: per user, subsample `split.sample_size` records,
// profile the last `test_size` as that user's test set and the first
// train_size as the query, then rank every user's test profile against each
// query. One row per train size. `split.train_size` is ignored.
PredictionReport run_prediction_task(const UserCorpus& corpus, const SplitSpec& split,
                                     const FeatureEmbedding& embedding, const ClusterModel& model,
                                     const std::vector<std::size_t>& train_sizes);

std::string prediction_to_csv(const PredictionReport& report);

// An embedded, labeled test item for the clustering evaluation.
struct LabeledEmbedding {
    std::string id;
    std::string label;
    Vector x;
};

// Labeled records as test items, id "user_id/image_id"; unlabeled records skipped.
std::vector<LabeledEmbedding> labeled_embeddings(const UserCorpus& corpus, const FeatureEmbedding& embedding);

// Average precision of same-label retrieval for item `query_index` among all
// other items (distance ascending, ties by id). nullopt when the query has
// no same-label partner.
std::optional<double> average_precision(std::size_t query_index, const std::vector<LabeledEmbedding>& items);

struct MapReport {
    std::vector<std::pair<std::string, double>> per_query;
    std::vector<std::string> excluded;
    double map = 0.0;
};

MapReport mean_average_precision(const std::vector<LabeledEmbedding>& items);

// CSV query_id,ap plus a final "mean" summary row.
std::string map_report_to_csv(const MapReport& report);

}  // namespace vizpref

#endif  // VIZPREF_EVALUATE_HPP
