#ifndef VIZPREF_CORPUS_HPP
#define VIZPREF_CORPUS_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vizpref/common.hpp"

namespace vizpref {

// One posted image: owner, id, post time, optional category and its
// precomputed feature vector.
struct ImageRecord {
    std::string user_id;
    std::string image_id;
    std::int64_t timestamp = 0;
    std::optional<std::string> label;
    Vector features;
};

// Strict weak order used everywhere a user's collection is sequenced:
// timestamp ascending, ties broken by image id.
bool chronologically_before(const ImageRecord& a, const ImageRecord& b);

// Users keyed by id, each holding a chronologically sorted, non-empty
// sequence. Built through from_records() or insert_user(), which enforce
// the invariants.
class UserCorpus {
public:
    using Sequence = std::vector<ImageRecord>;

    UserCorpus() = default;
    explicit UserCorpus(std::size_t feature_dim) : feature_dim_(feature_dim) {}

    // Groups records by user and sorts each group. Throws DataError on a
    // feature-dimension mismatch, a negative timestamp or a duplicate
    // (user_id, image_id).
    static UserCorpus from_records(std::vector<ImageRecord> records);

    // Inserts a whole, already validated user sequence (sorted here).
    void insert_user(const std::string& user_id, Sequence records);

    const std::map<std::string, Sequence>& users() const { return users_; }
    std::size_t feature_dim() const { return feature_dim_; }
    std::size_t user_count() const { return users_.size(); }
    std::size_t record_count() const;
    bool empty() const { return users_.empty(); }

    const Sequence& user(const std::string& user_id) const;
    bool contains(const std::string& user_id) const { return users_.contains(user_id); }
    std::vector<std::string> user_ids() const;

    // All records flattened in (user_id, chronological) order.
    std::vector<ImageRecord> records() const;

    friend bool operator==(const UserCorpus&, const UserCorpus&);

private:
    std::map<std::string, Sequence> users_;
    std::size_t feature_dim_ = 0;
};

bool operator==(const ImageRecord& a, const ImageRecord& b);

enum class CorpusFormat { jsonl, csv };

// Reads a corpus file. Lines starting with '#' are comments. Errors carry
// the 1-based line number of the offending record.
UserCorpus load_corpus(const std::filesystem::path& path, CorpusFormat format);
UserCorpus parse_corpus(const std::string& text, CorpusFormat format);

// Writes the JSONL form; `header_comment` (if non-empty) is emitted as a
// leading '# ...' line.
void write_corpus_jsonl(const UserCorpus& corpus, const std::filesystem::path& path,
                        const std::string& header_comment = {});
std::string corpus_to_jsonl(const UserCorpus& corpus);
std::string corpus_to_csv(const UserCorpus& corpus);

// Keeps users with at least `min_pins` records and at least one record at
// or after `cutoff_time`.
UserCorpus filter_active(const UserCorpus& corpus, std::size_t min_pins, std::int64_t cutoff_time);

struct BackgroundSplit {
    UserCorpus background;
    UserCorpus remainder;
};

// Seeded uniform choice of `n_users` users, without replacement.
BackgroundSplit select_background(const UserCorpus& corpus, std::size_t n_users, std::uint64_t seed);

struct SplitSpec {
    std::size_t sample_size = 100;
    std::size_t test_size = 50;
    std::size_t train_size = 50;
    std::uint64_t seed = 0;

    void validate() const;
};

struct ChronologicalSplit {
    std::vector<ImageRecord> train;
    std::vector<ImageRecord> test;
};

// Subsamples `sample_size` records, restores chronological order, then takes
// the first `train_size` as train and the last `test_size` as test.
ChronologicalSplit chronological_split(const std::vector<ImageRecord>& user_records, const SplitSpec& plan);

}  // namespace vizpref

#endif  // VIZPREF_CORPUS_HPP
