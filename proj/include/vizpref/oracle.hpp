#ifndef VIZPREF_ORACLE_HPP
#define VIZPREF_ORACLE_HPP

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "vizpref/common.hpp"

// Reference implementations written as literal formula transcriptions: naive
// loops, no algebraic shortcuts, and no calls into the production modules.
// They exist to regenerate expected values for tests.
namespace vizpref::oracle {

double contrastive_loss(const Vector& ex, const Vector& ey, int label, double margin);

// (1/n^2) sum_i sum_j |d_i - d_j|^2 by explicit double loop.
double bandwidth(const std::vector<Vector>& points);

Vector soft_assign(const Vector& d, const std::vector<Vector>& centers, double bandwidth_sq, double cutoff);

struct Profile {
    Vector raw;
    Vector normalized;
};
Profile profile(const std::vector<Vector>& assignments);

// Log-odds difference, variance and z, evaluated term by term in 50-digit
// decimal arithmetic and rounded to double at the end.
Vector log_odds_delta(const Vector& counts_i, const Vector& counts_j, const Vector& bg, double prior_scale);
Vector variance(const Vector& counts_i, const Vector& counts_j, const Vector& bg, double prior_scale);
Vector z_scores(const Vector& counts_i, const Vector& counts_j, const Vector& bg, double prior_scale);

// Precision@k for every k over a fully re-sorted candidate list, averaged
// over the ranks that hold a relevant item. Returns a negative value when
// no candidate is relevant.
double average_precision(const Vector& query, const std::string& query_label,
                         const std::vector<Vector>& candidates, const std::vector<std::string>& labels,
                         const std::vector<std::string>& ids);

double mrr(const std::vector<std::size_t>& ranks);

// Dispatches by operation name on JSON inputs; throws Error for an
// unknown name. Supported: contrastive_loss, bandwidth, soft_assign,
// profile, log_odds_delta, variance, z_scores, average_precision, mrr.
nlohmann::json oracle_eval(std::string_view op, const nlohmann::json& inputs);

}  // namespace vizpref::oracle

#endif  // VIZPREF_ORACLE_HPP
