#include "vizpref/profile.hpp"

#include <fstream>
#include <sstream>

namespace vizpref {

using json = nlohmann::json;

UserProfile build_profile(const std::string& user_id, const std::vector<Vector>& assignments) {
    if (assignments.empty()) {
        throw DataError("user '" + user_id + "' has no assignment vectors");
    }
    const std::size_t k = assignments.front().size();
    if (k == 0) {
        throw DataError("assignment vectors are empty");
    }
    UserProfile profile;
    profile.user_id = user_id;
    profile.raw_counts.assign(k, 0.0);
    for (const auto& c : assignments) {
        if (c.size() != k) {
            throw DataError("user '" + user_id + "': assignment vectors differ in length");
        }
        for (std::size_t i = 0; i < k; ++i) {
            profile.raw_counts[i] += c[i];
        }
    }
    for (const double x : profile.raw_counts) {
        profile.mass += x;
    }
    if (profile.mass > 0.0) {
        profile.normalized.resize(k);
        for (std::size_t i = 0; i < k; ++i) {
            profile.normalized[i] = profile.raw_counts[i] / profile.mass;
        }
    } else {
        profile.normalized.assign(k, 1.0 / static_cast<double>(k));
        profile.degenerate = true;
    }
    return profile;
}

double BackgroundDistribution::total() const {
    double sum = 0.0;
    for (const double x : counts) {
        sum += x;
    }
    return sum;
}

BackgroundDistribution background_distribution(const std::vector<Vector>& assignments) {
    if (assignments.empty()) {
        throw DataError("background corpus has no images");
    }
    BackgroundDistribution bg;
    bg.counts.assign(assignments.front().size(), 0.0);
    for (const auto& c : assignments) {
        if (c.size() != bg.k()) {
            throw DataError("background assignment vectors differ in length");
        }
        for (std::size_t i = 0; i < c.size(); ++i) {
            bg.counts[i] += c[i];
        }
    }
    if (!(bg.total() > 0.0)) {
        throw NumericError("background distribution has zero mass; every image fell outside the cutoff");
    }
    return bg;
}

std::vector<Vector> assign_records(const std::vector<ImageRecord>& records, const ClusterModel& model) {
    std::vector<Vector> out(records.size());
    parallel_for(records.size(), 0, [&](std::size_t i) { out[i] = soft_assign(records[i].features, model); });
    return out;
}

std::vector<UserProfile> build_profiles(const UserCorpus& embedded, const ClusterModel& model) {
    const auto ids = embedded.user_ids();
    std::vector<UserProfile> profiles(ids.size());
    parallel_for(ids.size(), 0, [&](std::size_t i) {
        profiles[i] = build_profile(ids[i], assign_records(embedded.user(ids[i]), model));
    });
    return profiles;
}

std::string profiles_to_csv(const std::vector<UserProfile>& profiles) {
    std::string out = "user_id,Z,degenerate_flag";
    const std::size_t k = profiles.empty() ? 0 : profiles.front().k();
    for (std::size_t i = 1; i <= k; ++i) {
        out += ",v" + std::to_string(i);
    }
    out += '\n';
    for (const auto& p : profiles) {
        if (p.user_id.find_first_of(",\n") != std::string::npos) {
            throw DataError("user id '" + p.user_id + "' cannot be written to a profile CSV");
        }
        out += p.user_id + ',' + format_double(p.mass) + ',' + (p.degenerate ? "1" : "0");
        for (const double v : p.normalized) {
            out += ',' + format_double(v);
        }
        out += '\n';
    }
    return out;
}

void write_profiles_csv(const std::vector<UserProfile>& profiles, const std::filesystem::path& path,
                        const std::string& header_comment) {
    write_text_file(path, profiles_to_csv(profiles), header_comment);
}

std::vector<UserProfile> parse_profiles_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::size_t k = 0;
    std::vector<UserProfile> profiles;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.front() == '#') {
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream row(line);
        std::string field;
        while (std::getline(row, field, ',')) {
            fields.push_back(field);
        }
        const std::string where = "profiles line " + std::to_string(line_no);
        if (!header_seen) {
            if (fields.size() < 4 || fields[0] != "user_id" || fields[1] != "Z" || fields[2] != "degenerate_flag") {
                throw DataError(where + ": expected header user_id,Z,degenerate_flag,v1..vK");
            }
            k = fields.size() - 3;
            header_seen = true;
            continue;
        }
        if (fields.size() != k + 3) {
            throw DataError(where + ": expected " + std::to_string(k + 3) + " fields");
        }
        UserProfile p;
        try {
            p.user_id = fields[0];
            p.mass = std::stod(fields[1]);
            p.degenerate = fields[2] == "1";
            for (std::size_t i = 0; i < k; ++i) {
                p.normalized.push_back(std::stod(fields[3 + i]));
            }
        } catch (const std::exception& e) {
            throw DataError(where + ": " + e.what());
        }
        p.raw_counts.assign(k, 0.0);
        if (!p.degenerate) {
            for (std::size_t i = 0; i < k; ++i) {
                p.raw_counts[i] = p.normalized[i] * p.mass;
            }
        }
        profiles.push_back(std::move(p));
    }
    return profiles;
}

std::vector<UserProfile> load_profiles_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open profiles " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_profiles_csv(buf.str());
}

json background_to_json(const BackgroundDistribution& bg) { return {{"k", bg.k()}, {"counts", bg.counts}}; }

BackgroundDistribution background_from_json(const json& j) {
    try {
        BackgroundDistribution bg{j.at("counts").get<Vector>()};
        if (bg.k() != j.at("k").get<std::size_t>()) {
            throw DataError("background k field disagrees with counts");
        }
        if (!(bg.total() > 0.0)) {
            throw NumericError("background distribution has zero mass");
        }
        return bg;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed background file: ") + e.what());
    }
}

void save_background(const BackgroundDistribution& bg, const std::filesystem::path& path, const json& meta) {
    json j = background_to_json(bg);
    for (const auto& [key, value] : meta.items()) {
        j[key] = value;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    out << j.dump(1) << '\n';
}

BackgroundDistribution load_background(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open background file " + path.string());
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError("background file " + path.string() + ": " + e.what());
    }
    return background_from_json(j);
}

}  // namespace vizpref
