#include "vizpref/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/tokenizer.hpp>
#include <json.hpp>

namespace vizpref {

using json = nlohmann::json;

bool chronologically_before(const ImageRecord& a, const ImageRecord& b) {
    if (a.timestamp != b.timestamp) {
        return a.timestamp < b.timestamp;
    }
    return a.image_id < b.image_id;
}

bool operator==(const ImageRecord& a, const ImageRecord& b) {
    return a.user_id == b.user_id && a.image_id == b.image_id && a.timestamp == b.timestamp &&
           a.label == b.label && a.features == b.features;
}

bool operator==(const UserCorpus& a, const UserCorpus& b) {
    return a.feature_dim_ == b.feature_dim_ && a.users_ == b.users_;
}

namespace {

void check_record(const ImageRecord& r, std::size_t dim, const std::string& where) {
    if (r.features.size() != dim) {
        throw DataError(where + ": feature dimension " + std::to_string(r.features.size()) +
                        " does not match corpus dimension " + std::to_string(dim));
    }
    if (r.timestamp < 0) {
        throw DataError(where + ": negative timestamp");
    }
}

}  // namespace

UserCorpus UserCorpus::from_records(std::vector<ImageRecord> records) {
    UserCorpus corpus;
    if (records.empty()) {
        return corpus;
    }
    corpus.feature_dim_ = records.front().features.size();
    std::set<std::pair<std::string, std::string>> seen;
    for (std::size_t i = 0; i < records.size(); ++i) {
        auto& r = records[i];
        check_record(r, corpus.feature_dim_, "record " + std::to_string(i + 1));
        if (!seen.emplace(r.user_id, r.image_id).second) {
            throw DataError("record " + std::to_string(i + 1) + ": duplicate image '" + r.image_id +
                            "' for user '" + r.user_id + "'");
        }
        corpus.users_[r.user_id].push_back(std::move(r));
    }
    for (auto& [id, seq] : corpus.users_) {
        std::sort(seq.begin(), seq.end(), chronologically_before);
    }
    return corpus;
}

void UserCorpus::insert_user(const std::string& user_id, Sequence records) {
    if (records.empty()) {
        throw DataError("user '" + user_id + "' has no records");
    }
    if (users_.empty() && feature_dim_ == 0) {
        feature_dim_ = records.front().features.size();
    }
    for (const auto& r : records) {
        check_record(r, feature_dim_, "user '" + user_id + "'");
        if (r.user_id != user_id) {
            throw DataError("record owner '" + r.user_id + "' inserted under '" + user_id + "'");
        }
    }
    std::sort(records.begin(), records.end(), chronologically_before);
    users_[user_id] = std::move(records);
}

std::size_t UserCorpus::record_count() const {
    std::size_t n = 0;
    for (const auto& [id, seq] : users_) {
        n += seq.size();
    }
    return n;
}

const UserCorpus::Sequence& UserCorpus::user(const std::string& user_id) const {
    const auto it = users_.find(user_id);
    if (it == users_.end()) {
        throw DataError("unknown user '" + user_id + "'");
    }
    return it->second;
}

std::vector<std::string> UserCorpus::user_ids() const {
    std::vector<std::string> ids;
    ids.reserve(users_.size());
    for (const auto& [id, seq] : users_) {
        ids.push_back(id);
    }
    return ids;
}

std::vector<ImageRecord> UserCorpus::records() const {
    std::vector<ImageRecord> out;
    out.reserve(record_count());
    for (const auto& [id, seq] : users_) {
        out.insert(out.end(), seq.begin(), seq.end());
    }
    return out;
}

namespace {

ImageRecord parse_json_record(const std::string& line) {
    const json j = json::parse(line);
    if (!j.is_object()) {
        throw DataError("record is not a JSON object");
    }
    ImageRecord r;
    r.user_id = j.at("user_id").get<std::string>();
    r.image_id = j.at("image_id").get<std::string>();
    if (!j.at("timestamp").is_number_integer()) {
        throw DataError("timestamp must be an integer");
    }
    r.timestamp = j.at("timestamp").get<std::int64_t>();
    if (const auto it = j.find("label"); it != j.end() && !it->is_null()) {
        r.label = it->get<std::string>();
    }
    const auto& f = j.at("features");
    if (!f.is_array()) {
        throw DataError("features must be an array");
    }
    r.features.reserve(f.size());
    for (const auto& x : f) {
        if (!x.is_number()) {
            throw DataError("features must be numeric");
        }
        r.features.push_back(x.get<double>());
    }
    return r;
}

std::vector<std::string> split_csv(const std::string& line) {
    using Separator = boost::escaped_list_separator<char>;
    boost::tokenizer<Separator> tokens(line, Separator('\\', ',', '"'));
    return {tokens.begin(), tokens.end()};
}

double parse_number(const std::string& field) {
    std::size_t used = 0;
    const double value = std::stod(field, &used);
    if (used != field.size()) {
        throw DataError("trailing characters in number '" + field + "'");
    }
    return value;
}

std::int64_t parse_integer(const std::string& field) {
    std::size_t used = 0;
    const long long value = std::stoll(field, &used);
    if (used != field.size()) {
        throw DataError("invalid integer '" + field + "'");
    }
    return value;
}

bool is_blank_or_comment(const std::string& line) {
    const auto pos = line.find_first_not_of(" \t\r");
    return pos == std::string::npos || line[pos] == '#';
}

}  // namespace

UserCorpus parse_corpus(const std::string& text, CorpusFormat format) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    std::optional<std::size_t> dim;
    std::vector<ImageRecord> records;
    bool header_seen = false;
    std::size_t csv_columns = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (is_blank_or_comment(line)) {
            continue;
        }
        const std::string where = "line " + std::to_string(line_no);
        if (format == CorpusFormat::csv && !header_seen) {
            const auto header = split_csv(line);
            static const std::vector<std::string> kFixed{"user_id", "image_id", "timestamp", "label"};
            if (header.size() < kFixed.size() || !std::equal(kFixed.begin(), kFixed.end(), header.begin())) {
                throw DataError(where + ": CSV header must start with user_id,image_id,timestamp,label");
            }
            for (std::size_t i = kFixed.size(); i < header.size(); ++i) {
                if (header[i] != "f" + std::to_string(i - kFixed.size())) {
                    throw DataError(where + ": expected feature column f" + std::to_string(i - kFixed.size()));
                }
            }
            csv_columns = header.size();
            header_seen = true;
            continue;
        }

        ImageRecord r;
        try {
            if (format == CorpusFormat::jsonl) {
                r = parse_json_record(line);
            } else {
                const auto fields = split_csv(line);
                if (fields.size() != csv_columns) {
                    throw DataError("expected " + std::to_string(csv_columns) + " fields, got " +
                                    std::to_string(fields.size()));
                }
                r.user_id = fields[0];
                r.image_id = fields[1];
                r.timestamp = parse_integer(fields[2]);
                if (!fields[3].empty()) {
                    r.label = fields[3];
                }
                for (std::size_t i = 4; i < fields.size(); ++i) {
                    r.features.push_back(parse_number(fields[i]));
                }
            }
        } catch (const DataError& e) {
            throw DataError(where + ": " + e.what());
        } catch (const std::exception& e) {
            throw DataError(where + ": malformed record (" + e.what() + ")");
        }

        if (!dim) {
            dim = r.features.size();
        } else if (r.features.size() != *dim) {
            throw DataError(where + ": feature dimension " + std::to_string(r.features.size()) +
                            " does not match " + std::to_string(*dim));
        }
        if (r.timestamp < 0) {
            throw DataError(where + ": negative timestamp");
        }
        records.push_back(std::move(r));
    }
    return UserCorpus::from_records(std::move(records));
}

UserCorpus load_corpus(const std::filesystem::path& path, CorpusFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open corpus file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_corpus(buf.str(), format);
}

std::string corpus_to_jsonl(const UserCorpus& corpus) {
    std::string out;
    for (const auto& [id, seq] : corpus.users()) {
        for (const auto& r : seq) {
            json j;
            j["user_id"] = r.user_id;
            j["image_id"] = r.image_id;
            j["timestamp"] = r.timestamp;
            j["label"] = r.label ? json(*r.label) : json(nullptr);
            j["features"] = r.features;
            out += j.dump();
            out += '\n';
        }
    }
    return out;
}

namespace {

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\\\n") == std::string::npos) {
        return field;
    }
    std::string out = "\"";
    for (const char c : field) {
        if (c == '"' || c == '\\') {
            out += '\\';
        }
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace

std::string corpus_to_csv(const UserCorpus& corpus) {
    std::string out = "user_id,image_id,timestamp,label";
    for (std::size_t i = 0; i < corpus.feature_dim(); ++i) {
        out += ",f" + std::to_string(i);
    }
    out += '\n';
    for (const auto& [id, seq] : corpus.users()) {
        for (const auto& r : seq) {
            out += csv_escape(r.user_id) + ',' + csv_escape(r.image_id) + ',' + std::to_string(r.timestamp) + ',' +
                   (r.label ? csv_escape(*r.label) : std::string{});
            for (const double x : r.features) {
                out += ',' + format_double(x);
            }
            out += '\n';
        }
    }
    return out;
}

void write_corpus_jsonl(const UserCorpus& corpus, const std::filesystem::path& path,
                        const std::string& header_comment) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    if (!header_comment.empty()) {
        out << "# " << header_comment << '\n';
    }
    out << corpus_to_jsonl(corpus);
}

UserCorpus filter_active(const UserCorpus& corpus, std::size_t min_pins, std::int64_t cutoff_time) {
    UserCorpus out(corpus.feature_dim());
    for (const auto& [id, seq] : corpus.users()) {
        if (seq.size() < min_pins) {
            continue;
        }
        // Sequences are sorted, so the last record carries the latest time.
        if (seq.back().timestamp < cutoff_time) {
            continue;
        }
        out.insert_user(id, seq);
    }
    return out;
}

BackgroundSplit select_background(const UserCorpus& corpus, std::size_t n_users, std::uint64_t seed) {
    if (n_users > corpus.user_count()) {
        throw DataError("background size " + std::to_string(n_users) + " exceeds population of " +
                        std::to_string(corpus.user_count()) + " users");
    }
    const auto ids = corpus.user_ids();
    Rng rng(seed);
    const auto picks = rng.sample_without_replacement(ids.size(), n_users);
    std::vector<bool> chosen(ids.size(), false);
    for (const auto i : picks) {
        chosen[i] = true;
    }
    BackgroundSplit split{UserCorpus(corpus.feature_dim()), UserCorpus(corpus.feature_dim())};
    for (std::size_t i = 0; i < ids.size(); ++i) {
        auto& target = chosen[i] ? split.background : split.remainder;
        target.insert_user(ids[i], corpus.user(ids[i]));
    }
    return split;
}

void SplitSpec::validate() const {
    if (sample_size == 0 || test_size == 0 || train_size == 0) {
        throw DataError("split sizes must be positive");
    }
    if (train_size + test_size > sample_size) {
        throw DataError("train_size + test_size (" + std::to_string(train_size + test_size) +
                        ") exceeds sample_size (" + std::to_string(sample_size) + ")");
    }
}

ChronologicalSplit chronological_split(const std::vector<ImageRecord>& user_records, const SplitSpec& plan) {
    plan.validate();
    const std::string owner = user_records.empty() ? std::string{"<empty>"} : user_records.front().user_id;
    if (user_records.size() < plan.sample_size) {
        throw DataError("user '" + owner + "' has " + std::to_string(user_records.size()) +
                        " records, split needs " + std::to_string(plan.sample_size));
    }
    // Mix the owner into the seed so users do not share one subsample pattern.
    const std::uint64_t user_seed = plan.seed ^ std::stoull(digest_hex(owner), nullptr, 16);
    Rng rng(user_seed);
    const auto picks = rng.sample_without_replacement(user_records.size(), plan.sample_size);

    std::vector<ImageRecord> sample;
    sample.reserve(picks.size());
    for (const auto i : picks) {
        sample.push_back(user_records[i]);
    }
    std::sort(sample.begin(), sample.end(), chronologically_before);

    ChronologicalSplit split;
    split.train.assign(sample.begin(), sample.begin() + static_cast<std::ptrdiff_t>(plan.train_size));
    split.test.assign(sample.end() - static_cast<std::ptrdiff_t>(plan.test_size), sample.end());
    return split;
}

}  // namespace vizpref
