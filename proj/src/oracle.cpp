#include "vizpref/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/multiprecision/cpp_dec_float.hpp>

namespace vizpref::oracle {

namespace mp = boost::multiprecision;
using Big = mp::cpp_dec_float_50;

double contrastive_loss(const Vector& ex, const Vector& ey, int label, double margin) {
    long double sum = 0.0L;
    for (std::size_t i = 0; i < ex.size(); ++i) {
        const long double diff = static_cast<long double>(ex[i]) - static_cast<long double>(ey[i]);
        sum += diff * diff;
    }
    const long double d = std::sqrt(sum);
    const long double hinge = std::max(0.0L, static_cast<long double>(margin) - d);
    return static_cast<double>(0.5L * label * d * d + 0.5L * (1 - label) * hinge * hinge);
}

double bandwidth(const std::vector<Vector>& points) {
    long double total = 0.0L;
    for (const auto& a : points) {
        for (const auto& b : points) {
            for (std::size_t k = 0; k < a.size(); ++k) {
                const long double diff = static_cast<long double>(a[k]) - static_cast<long double>(b[k]);
                total += diff * diff;
            }
        }
    }
    const long double n = static_cast<long double>(points.size());
    return static_cast<double>(total / (n * n));
}

Vector soft_assign(const Vector& d, const std::vector<Vector>& centers, double bandwidth_sq, double cutoff) {
    Vector out;
    for (const auto& r : centers) {
        long double norm_sq = 0.0L;
        for (std::size_t k = 0; k < d.size(); ++k) {
            const long double diff = static_cast<long double>(d[k]) - static_cast<long double>(r[k]);
            norm_sq += diff * diff;
        }
        const long double norm = std::sqrt(norm_sq);
        if (norm > cutoff) {
            out.push_back(0.0);
        } else {
            out.push_back(static_cast<double>(std::exp(-norm_sq / (2.0L * bandwidth_sq))));
        }
    }
    return out;
}

Profile profile(const std::vector<Vector>& assignments) {
    Profile p;
    p.raw.assign(assignments.front().size(), 0.0);
    for (std::size_t k = 0; k < p.raw.size(); ++k) {
        long double sum = 0.0L;
        for (const auto& c : assignments) {
            sum += c[k];
        }
        p.raw[k] = static_cast<double>(sum);
    }
    long double l1 = 0.0L;
    for (const double x : p.raw) {
        l1 += std::abs(static_cast<long double>(x));
    }
    for (const double x : p.raw) {
        p.normalized.push_back(l1 > 0.0L ? static_cast<double>(x / l1) : 1.0 / static_cast<double>(p.raw.size()));
    }
    return p;
}

namespace {

// log( (v(k) + a*bg(k)) / (sum_k v + a*sum_k bg - (v(k) + a*bg(k))) )
Big log_odds_term(const Vector& v, const Vector& bg, double prior_scale, std::size_t k) {
    const Big a(prior_scale);
    Big sum_v = 0;
    Big sum_bg = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        sum_v += Big(v[i]);
        sum_bg += Big(bg[i]);
    }
    const Big numerator = Big(v[k]) + a * Big(bg[k]);
    const Big denominator = sum_v + a * sum_bg - (Big(v[k]) + a * Big(bg[k]));
    return mp::log(numerator / denominator);
}

Big big_delta(const Vector& ci, const Vector& cj, const Vector& bg, double a, std::size_t k) {
    return log_odds_term(ci, bg, a, k) - log_odds_term(cj, bg, a, k);
}

Big big_variance(const Vector& ci, const Vector& cj, const Vector& bg, double a, std::size_t k) {
    const Big prior = Big(a) * Big(bg[k]);
    return Big(1) / (Big(ci[k]) + prior) + Big(1) / (Big(cj[k]) + prior);
}

}  // namespace

Vector log_odds_delta(const Vector& counts_i, const Vector& counts_j, const Vector& bg, double prior_scale) {
    Vector out;
    for (std::size_t k = 0; k < bg.size(); ++k) {
        out.push_back(big_delta(counts_i, counts_j, bg, prior_scale, k).convert_to<double>());
    }
    return out;
}

Vector variance(const Vector& counts_i, const Vector& counts_j, const Vector& bg, double prior_scale) {
    Vector out;
    for (std::size_t k = 0; k < bg.size(); ++k) {
        out.push_back(big_variance(counts_i, counts_j, bg, prior_scale, k).convert_to<double>());
    }
    return out;
}

Vector z_scores(const Vector& counts_i, const Vector& counts_j, const Vector& bg, double prior_scale) {
    Vector out;
    for (std::size_t k = 0; k < bg.size(); ++k) {
        const Big z = big_delta(counts_i, counts_j, bg, prior_scale, k) /
                      mp::sqrt(big_variance(counts_i, counts_j, bg, prior_scale, k));
        out.push_back(z.convert_to<double>());
    }
    return out;
}

double average_precision(const Vector& query, const std::string& query_label, const std::vector<Vector>& candidates,
                         const std::vector<std::string>& labels, const std::vector<std::string>& ids) {
    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto dist = [&](std::size_t i) {
        long double s = 0.0L;
        for (std::size_t k = 0; k < query.size(); ++k) {
            const long double diff = static_cast<long double>(query[k]) - static_cast<long double>(candidates[i][k]);
            s += diff * diff;
        }
        return std::sqrt(s);
    };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const long double da = dist(a);
        const long double db = dist(b);
        return da < db || (da == db && ids[a] < ids[b]);
    });
    std::size_t total_relevant = 0;
    for (const auto& l : labels) {
        total_relevant += l == query_label ? 1 : 0;
    }
    if (total_relevant == 0) {
        return -1.0;
    }
    // Precision and relevance at every cutoff k = 1..n.
    long double ap = 0.0L;
    for (std::size_t k = 1; k <= order.size(); ++k) {
        std::size_t hits = 0;
        for (std::size_t r = 0; r < k; ++r) {
            hits += labels[order[r]] == query_label ? 1 : 0;
        }
        const bool relevant_at_k = labels[order[k - 1]] == query_label;
        if (relevant_at_k) {
            ap += static_cast<long double>(hits) / static_cast<long double>(k);
        }
    }
    return static_cast<double>(ap / static_cast<long double>(total_relevant));
}

double mrr(const std::vector<std::size_t>& ranks) {
    long double sum = 0.0L;
    for (const auto r : ranks) {
        sum += 1.0L / static_cast<long double>(r);
    }
    return static_cast<double>(sum / static_cast<long double>(ranks.size()));
}

nlohmann::json oracle_eval(std::string_view op, const nlohmann::json& in) {
    if (op == "contrastive_loss") {
        return contrastive_loss(in.at("ex").get<Vector>(), in.at("ey").get<Vector>(), in.at("label").get<int>(),
                                in.at("margin").get<double>());
    }
    if (op == "bandwidth") {
        return bandwidth(in.at("points").get<std::vector<Vector>>());
    }
    if (op == "soft_assign") {
        return soft_assign(in.at("d").get<Vector>(), in.at("centers").get<std::vector<Vector>>(),
                           in.at("bandwidth_sq").get<double>(), in.at("cutoff").get<double>());
    }
    if (op == "profile") {
        const auto p = profile(in.at("assignments").get<std::vector<Vector>>());
        return {{"raw", p.raw}, {"normalized", p.normalized}};
    }
    if (op == "log_odds_delta" || op == "variance" || op == "z_scores") {
        const auto ci = in.at("counts_i").get<Vector>();
        const auto cj = in.at("counts_j").get<Vector>();
        const auto bg = in.at("bg").get<Vector>();
        const double a = in.at("prior_scale").get<double>();
        if (op == "log_odds_delta") {
            return log_odds_delta(ci, cj, bg, a);
        }
        if (op == "variance") {
            return variance(ci, cj, bg, a);
        }
        return z_scores(ci, cj, bg, a);
    }
    if (op == "average_precision") {
        return average_precision(in.at("query").get<Vector>(), in.at("query_label").get<std::string>(),
                                 in.at("candidates").get<std::vector<Vector>>(),
                                 in.at("labels").get<std::vector<std::string>>(),
                                 in.at("ids").get<std::vector<std::string>>());
    }
    if (op == "mrr") {
        return mrr(in.at("ranks").get<std::vector<std::size_t>>());
    }
    throw Error("unsupported oracle operation '" + std::string(op) + "'");
}

}  // namespace vizpref::oracle
