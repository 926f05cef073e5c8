#include "vizpref/evaluate.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace vizpref {

RankingOutcome rank_candidates(const UserProfile& query, const std::vector<UserProfile>& candidates,
                               const std::string& true_id) {
    const auto truth = std::find_if(candidates.begin(), candidates.end(),
                                    [&](const UserProfile& p) { return p.user_id == true_id; });
    if (truth == candidates.end()) {
        throw DataError("true candidate '" + true_id + "' is not among the candidates");
    }
    const double true_dist = euclidean_distance(query.normalized, truth->normalized);
    std::size_t ahead = 0;
    for (const auto& c : candidates) {
        if (&c == &*truth) {
            continue;
        }
        if (euclidean_distance(query.normalized, c.normalized) <= true_dist) {
            ++ahead;
        }
    }
    RankingOutcome outcome;
    outcome.user_id = true_id;
    outcome.rank = ahead + 1;
    outcome.reciprocal = 1.0 / static_cast<double>(outcome.rank);
    return outcome;
}

double mrr(const std::vector<RankingOutcome>& outcomes) {
    if (outcomes.empty()) {
        throw DataError("MRR of no outcomes");
    }
    double sum = 0.0;
    for (const auto& o : outcomes) {
        sum += o.reciprocal;
    }
    return sum / static_cast<double>(outcomes.size());
}

double random_mrr_baseline(std::size_t n_candidates) {
    if (n_candidates == 0) {
        throw DataError("random baseline needs at least one candidate");
    }
    double harmonic = 0.0;
    for (std::size_t r = 1; r <= n_candidates; ++r) {
        harmonic += 1.0 / static_cast<double>(r);
    }
    return harmonic / static_cast<double>(n_candidates);
}

namespace {

UserProfile profile_records(const std::string& user_id, const std::vector<ImageRecord>& records,
                            const FeatureEmbedding& embedding, const ClusterModel& model) {
    std::vector<Vector> assignments;
    assignments.reserve(records.size());
    for (const auto& r : records) {
        assignments.push_back(soft_assign(embedding.apply(r.features), model));
    }
    return build_profile(user_id, assignments);
}

}  // namespace

PredictionReport run_prediction_task(const UserCorpus& corpus, const SplitSpec& split,
                                     const FeatureEmbedding& embedding, const ClusterModel& model,
                                     const std::vector<std::size_t>& train_sizes) {
    if (train_sizes.empty()) {
        throw DataError("no train sizes requested");
    }
    const std::size_t max_train = *std::max_element(train_sizes.begin(), train_sizes.end());
    SplitSpec widest = split;
    widest.train_size = max_train;
    widest.validate();

    PredictionReport report;
    struct Prepared {
        std::string id;
        ChronologicalSplit halves;
    };
    std::vector<Prepared> users;
    for (const auto& [id, seq] : corpus.users()) {
        try {
            users.push_back({id, chronological_split(seq, widest)});
        } catch (const DataError& e) {
            report.excluded.emplace_back(id, e.what());
        }
    }
    if (users.size() < 2) {
        throw DataError("prediction task needs at least two eligible users, got " + std::to_string(users.size()));
    }

    // The subsample does not depend on train_size, so test profiles are shared.
    std::vector<UserProfile> test_profiles(users.size());
    parallel_for(users.size(), 0, [&](std::size_t i) {
        test_profiles[i] = profile_records(users[i].id, users[i].halves.test, embedding, model);
    });

    for (const std::size_t train_size : train_sizes) {
        if (train_size == 0) {
            throw DataError("train size must be positive");
        }
        std::vector<RankingOutcome> outcomes(users.size());
        parallel_for(users.size(), 0, [&](std::size_t i) {
            const auto& train = users[i].halves.train;
            const std::vector<ImageRecord> prefix(train.begin(),
                                                  train.begin() + static_cast<std::ptrdiff_t>(train_size));
            const auto query = profile_records(users[i].id, prefix, embedding, model);
            outcomes[i] = rank_candidates(query, test_profiles, users[i].id);
        });
        report.rows.push_back({train_size, mrr(outcomes), random_mrr_baseline(users.size()), users.size()});
    }
    return report;
}

std::string prediction_to_csv(const PredictionReport& report) {
    std::string out = "train_size,mrr,random_baseline\n";
    for (const auto& row : report.rows) {
        out += std::to_string(row.train_size) + ',' + format_double(row.mrr) + ',' + format_double(row.random_baseline) +
               '\n';
    }
    return out;
}

std::vector<LabeledEmbedding> labeled_embeddings(const UserCorpus& corpus, const FeatureEmbedding& embedding) {
    std::vector<LabeledEmbedding> items;
    for (const auto& [id, seq] : corpus.users()) {
        for (const auto& r : seq) {
            if (r.label) {
                items.push_back({r.user_id + "/" + r.image_id, *r.label, embedding.apply(r.features)});
            }
        }
    }
    return items;
}

std::optional<double> average_precision(std::size_t query_index, const std::vector<LabeledEmbedding>& items) {
    if (query_index >= items.size()) {
        throw DataError("query index out of range");
    }
    const auto& query = items[query_index];
    struct Candidate {
        double dist;
        const LabeledEmbedding* item;
    };
    std::vector<Candidate> candidates;
    candidates.reserve(items.size() - 1);
    std::size_t relevant = 0;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i == query_index) {
            continue;
        }
        candidates.push_back({squared_distance(query.x, items[i].x), &items[i]});
        if (items[i].label == query.label) {
            ++relevant;
        }
    }
    if (relevant == 0) {
        return std::nullopt;
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.dist != b.dist) {
            return a.dist < b.dist;
        }
        return a.item->id < b.item->id;
    });
    double sum_precision = 0.0;
    std::size_t hits = 0;
    for (std::size_t r = 0; r < candidates.size() && hits < relevant; ++r) {
        if (candidates[r].item->label == query.label) {
            ++hits;
            sum_precision += static_cast<double>(hits) / static_cast<double>(r + 1);
        }
    }
    return sum_precision / static_cast<double>(relevant);
}

MapReport mean_average_precision(const std::vector<LabeledEmbedding>& items) {
    std::set<std::string> labels;
    for (const auto& item : items) {
        labels.insert(item.label);
    }
    if (labels.size() < 2) {
        throw DataError("mAP needs at least two labels, got " + std::to_string(labels.size()));
    }
    std::vector<std::optional<double>> aps(items.size());
    parallel_for(items.size(), 0, [&](std::size_t i) { aps[i] = average_precision(i, items); });

    MapReport report;
    double sum = 0.0;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (aps[i]) {
            report.per_query.emplace_back(items[i].id, *aps[i]);
            sum += *aps[i];
        } else {
            report.excluded.push_back(items[i].id);
        }
    }
    if (report.per_query.empty()) {
        throw DataError("no query has a same-label partner");
    }
    report.map = sum / static_cast<double>(report.per_query.size());
    return report;
}

std::string map_report_to_csv(const MapReport& report) {
    std::string out = "query_id,ap\n";
    for (const auto& [id, ap] : report.per_query) {
        out += id + ',' + format_double(ap) + '\n';
    }
    out += "mean," + format_double(report.map) + '\n';
    return out;
}

}  // namespace vizpref
