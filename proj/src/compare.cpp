#include "vizpref/compare.hpp"

#include <algorithm>
#include <cmath>

namespace vizpref {

PriorConfig PriorConfig::with_total_mass(const BackgroundDistribution& bg, double total_mass) {
    const double total = bg.total();
    if (!(total > 0.0) || !(total_mass > 0.0)) {
        throw NumericError("prior mass and background mass must be positive");
    }
    return PriorConfig{total_mass / total};
}

namespace {

void check_lengths(const Vector& a, const Vector& b, const BackgroundDistribution& bg) {
    if (a.size() != bg.k() || b.size() != bg.k()) {
        throw DataError("count vectors must have length K=" + std::to_string(bg.k()));
    }
}

void check_prior(const PriorConfig& prior) {
    if (!(prior.prior_scale > 0.0)) {
        throw DataError("prior_scale must be positive");
    }
}

Vector smoothed(const Vector& counts, const BackgroundDistribution& bg, const PriorConfig& prior) {
    Vector y(counts.size());
    for (std::size_t k = 0; k < counts.size(); ++k) {
        y[k] = counts[k] + prior.prior_scale * bg.counts[k];
    }
    return y;
}

Vector log_odds(const Vector& y, const char* who) {
    double total = 0.0;
    for (const double v : y) {
        total += v;
    }
    Vector out(y.size());
    for (std::size_t k = 0; k < y.size(); ++k) {
        const double rest = total - y[k];
        if (!(y[k] > 0.0) || !(rest > 0.0)) {
            throw NumericError(std::string("log-odds undefined for user ") + who + " at cluster " +
                               std::to_string(k + 1) + " (smoothed count " + format_double(y[k]) + ", remainder " +
                               format_double(rest) + ")");
        }
        out[k] = std::log(y[k] / rest);
    }
    return out;
}

}  // namespace

Vector log_odds_delta(const Vector& counts_i, const Vector& counts_j, const BackgroundDistribution& bg,
                      const PriorConfig& prior) {
    check_lengths(counts_i, counts_j, bg);
    check_prior(prior);
    const Vector li = log_odds(smoothed(counts_i, bg, prior), "i");
    const Vector lj = log_odds(smoothed(counts_j, bg, prior), "j");
    Vector delta(li.size());
    for (std::size_t k = 0; k < li.size(); ++k) {
        delta[k] = li[k] - lj[k];
    }
    return delta;
}

Vector delta_variance(const Vector& counts_i, const Vector& counts_j, const BackgroundDistribution& bg,
                      const PriorConfig& prior) {
    check_lengths(counts_i, counts_j, bg);
    check_prior(prior);
    const Vector yi = smoothed(counts_i, bg, prior);
    const Vector yj = smoothed(counts_j, bg, prior);
    Vector var(yi.size());
    for (std::size_t k = 0; k < yi.size(); ++k) {
        if (!(yi[k] > 0.0) || !(yj[k] > 0.0)) {
            throw NumericError("zero smoothed count at cluster " + std::to_string(k + 1));
        }
        var[k] = 1.0 / yi[k] + 1.0 / yj[k];
    }
    return var;
}

Vector z_scores(const Vector& delta, const Vector& variance) {
    if (delta.size() != variance.size()) {
        throw DataError("delta and variance lengths differ");
    }
    Vector z(delta.size());
    for (std::size_t k = 0; k < delta.size(); ++k) {
        if (!(variance[k] > 0.0)) {
            throw NumericError("nonpositive variance at cluster " + std::to_string(k + 1));
        }
        z[k] = delta[k] / std::sqrt(variance[k]);
    }
    return z;
}

double pairwise_max_z(const Vector& z) {
    if (z.empty()) {
        throw DataError("empty z vector");
    }
    double best = 0.0;
    for (const double v : z) {
        best = std::max(best, std::abs(v));
    }
    return best;
}

PairStats pair_stats(const UserProfile& a, const UserProfile& b, const BackgroundDistribution& bg,
                     const PriorConfig& prior) {
    PairStats s;
    s.user_i = a.user_id;
    s.user_j = b.user_id;
    try {
        s.delta = log_odds_delta(a.raw_counts, b.raw_counts, bg, prior);
        s.variance = delta_variance(a.raw_counts, b.raw_counts, bg, prior);
        s.z = z_scores(s.delta, s.variance);
    } catch (const NumericError& e) {
        throw NumericError("pair (" + a.user_id + ", " + b.user_id + "): " + e.what());
    } catch (const DataError& e) {
        throw DataError("pair (" + a.user_id + ", " + b.user_id + "): " + e.what());
    }
    s.z_max = pairwise_max_z(s.z);
    for (std::size_t k = 0; k < s.z.size(); ++k) {
        if (std::abs(s.z[k]) == s.z_max) {
            s.argmax_cluster = k;
            break;
        }
    }
    return s;
}

std::vector<PairStats> all_pairs_stats(const std::vector<UserProfile>& profiles, const BackgroundDistribution& bg,
                                       const PriorConfig& prior) {
    if (profiles.size() < 2) {
        throw DataError("pairwise comparison needs at least two profiles");
    }
    std::vector<const UserProfile*> sorted;
    sorted.reserve(profiles.size());
    for (const auto& p : profiles) {
        sorted.push_back(&p);
    }
    std::sort(sorted.begin(), sorted.end(),
              [](const UserProfile* a, const UserProfile* b) { return a->user_id < b->user_id; });

    std::vector<std::pair<std::size_t, std::size_t>> index_pairs;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        for (std::size_t j = i + 1; j < sorted.size(); ++j) {
            index_pairs.emplace_back(i, j);
        }
    }
    std::vector<PairStats> out(index_pairs.size());
    parallel_for(index_pairs.size(), 0, [&](std::size_t n) {
        const auto [i, j] = index_pairs[n];
        out[n] = pair_stats(*sorted[i], *sorted[j], bg, prior);
    });
    return out;
}

std::vector<EcdfStep> ecdf(std::vector<double> values) {
    if (values.empty()) {
        throw DataError("eCDF of an empty sample");
    }
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    std::vector<EcdfStep> steps;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i + 1 < values.size() && values[i + 1] == values[i]) {
            continue;
        }
        steps.push_back({values[i], static_cast<double>(i + 1) / n});
    }
    steps.back().fraction = 1.0;
    return steps;
}

std::string pair_stats_to_csv(const std::vector<PairStats>& stats) {
    std::string out = "user_i,user_j,z_max,argmax_cluster\n";
    for (const auto& s : stats) {
        out += s.user_i + ',' + s.user_j + ',' + format_double(s.z_max) + ',' + std::to_string(s.argmax_cluster + 1) +
               '\n';
    }
    return out;
}

std::string ecdf_to_csv(const std::vector<EcdfStep>& steps) {
    std::string out = "value,fraction\n";
    for (const auto& s : steps) {
        out += format_double(s.value) + ',' + format_double(s.fraction) + '\n';
    }
    return out;
}

}  // namespace vizpref
