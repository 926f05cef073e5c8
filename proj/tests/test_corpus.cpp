#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "vizpref/corpus.hpp"

using namespace vizpref;

namespace {

ImageRecord rec(const std::string& user, const std::string& image, std::int64_t ts, Vector f = {0.0}) {
    return ImageRecord{user, image, ts, std::nullopt, std::move(f)};
}

UserCorpus corpus_with_counts(const std::vector<std::pair<std::string, std::size_t>>& users,
                              std::int64_t first_ts = 0) {
    std::vector<ImageRecord> records;
    for (const auto& [id, n] : users) {
        for (std::size_t i = 0; i < n; ++i) {
            records.push_back(rec(id, "img" + std::to_string(i), first_ts + static_cast<std::int64_t>(i)));
        }
    }
    return UserCorpus::from_records(std::move(records));
}

}  // namespace

TEST_CASE("load_corpus: empty input gives zero users") {
    CHECK(parse_corpus("", CorpusFormat::jsonl).user_count() == 0);
    CHECK(parse_corpus("user_id,image_id,timestamp,label,f0\n", CorpusFormat::csv).user_count() == 0);
}

TEST_CASE("load_corpus: three-line fixture groups and sorts by time") {
    const std::string text =
        R"({"user_id":"bob","image_id":"b1","timestamp":20,"label":null,"features":[1,2,3]})"
        "\n"
        R"({"user_id":"alice","image_id":"a1","timestamp":5,"label":"beach","features":[0,0,1]})"
        "\n"
        R"({"user_id":"bob","image_id":"b0","timestamp":10,"label":"city","features":[4,5,6]})"
        "\n";
    const auto corpus = parse_corpus(text, CorpusFormat::jsonl);
    REQUIRE(corpus.user_count() == 2);
    CHECK(corpus.feature_dim() == 3);
    const auto& bob = corpus.user("bob");
    REQUIRE(bob.size() == 2);
    CHECK(bob[0].image_id == "b0");
    CHECK(bob[1].image_id == "b1");
    CHECK_FALSE(bob[1].label.has_value());
    CHECK(corpus.user("alice")[0].label == std::optional<std::string>("beach"));
}

TEST_CASE("load_corpus: dimension mismatch names the line") {
    const std::string text =
        R"({"user_id":"u","image_id":"a","timestamp":1,"label":null,"features":[1,2,3]})"
        "\n"
        R"({"user_id":"u","image_id":"b","timestamp":2,"label":null,"features":[1,2,3]})"
        "\n"
        R"({"user_id":"u","image_id":"c","timestamp":3,"label":null,"features":[1,2,3,4]})"
        "\n";
    try {
        parse_corpus(text, CorpusFormat::jsonl);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("load_corpus: malformed records are rejected") {
    CHECK_THROWS_AS(parse_corpus("{not json}\n", CorpusFormat::jsonl), DataError);
    CHECK_THROWS_AS(parse_corpus(R"({"user_id":"u","image_id":"a","timestamp":1.5,"features":[1]})", CorpusFormat::jsonl),
                    DataError);
    CHECK_THROWS_AS(parse_corpus(R"({"user_id":"u","image_id":"a","timestamp":-1,"features":[1]})", CorpusFormat::jsonl),
                    DataError);
    CHECK_THROWS_AS(parse_corpus("user_id,image_id,timestamp,label,f0\nu,a,1,,x\n", CorpusFormat::csv), DataError);
    CHECK_THROWS_AS(parse_corpus("user,image,ts\n", CorpusFormat::csv), DataError);
    // Duplicate (user_id, image_id).
    CHECK_THROWS_AS(parse_corpus("user_id,image_id,timestamp,label,f0\nu,a,1,,0\nu,a,2,,0\n", CorpusFormat::csv),
                    DataError);
}

TEST_CASE("load_corpus: CSV variant with empty label as null and comments") {
    const std::string text =
        "# produced by a test\n"
        "user_id,image_id,timestamp,label,f0,f1\n"
        "u1,x,3,,0.5,1.5\n"
        "u1,w,3,\"a,b\",2,3\n";
    const auto corpus = parse_corpus(text, CorpusFormat::csv);
    const auto& seq = corpus.user("u1");
    REQUIRE(seq.size() == 2);
    // Equal timestamps fall back to image id order.
    CHECK(seq[0].image_id == "w");
    CHECK(seq[0].label == std::optional<std::string>("a,b"));
    CHECK_FALSE(seq[1].label.has_value());
    CHECK(seq[1].features == Vector{0.5, 1.5});
}

TEST_CASE("corpus text formats round-trip") {
    std::vector<ImageRecord> records;
    Rng rng(3);
    for (int u = 0; u < 4; ++u) {
        for (int i = 0; i < 5; ++i) {
            ImageRecord r = rec("user" + std::to_string(u), "im" + std::to_string(i), static_cast<std::int64_t>(rng.index(4)),
                                {rng.normal(), rng.normal() * 1e-7, rng.normal() * 1e9});
            if (i % 2 == 0) {
                r.label = "lab" + std::to_string(i);
            }
            records.push_back(r);
        }
    }
    const auto corpus = UserCorpus::from_records(records);
    CHECK(parse_corpus(corpus_to_jsonl(corpus), CorpusFormat::jsonl) == corpus);
    CHECK(parse_corpus(corpus_to_csv(corpus), CorpusFormat::csv) == corpus);
}

TEST_CASE("filter_active: pin count and activity criteria") {
    const auto corpus = corpus_with_counts({{"few", 99}, {"enough", 100}});
    const auto kept = filter_active(corpus, 100, 0);
    CHECK(kept.user_ids() == std::vector<std::string>{"enough"});

    // All 100 records at times 0..99, cutoff after them.
    CHECK(filter_active(corpus, 100, 100).user_count() == 0);
    CHECK(filter_active(corpus, 100, 99).user_count() == 1);

    CHECK(filter_active(corpus, 0, 0) == corpus);
}

TEST_CASE("filter_active is idempotent") {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::pair<std::string, std::size_t>> users;
        for (int u = 0; u < 8; ++u) {
            users.emplace_back("u" + std::to_string(u), 1 + rng.index(30));
        }
        const auto corpus = corpus_with_counts(users, static_cast<std::int64_t>(rng.index(10)));
        const std::size_t min_pins = rng.index(30);
        const auto cutoff = static_cast<std::int64_t>(rng.index(40));
        const auto once = filter_active(corpus, min_pins, cutoff);
        CHECK(filter_active(once, min_pins, cutoff) == once);
    }
}

TEST_CASE("select_background partitions the users") {
    std::vector<std::pair<std::string, std::size_t>> users;
    for (int u = 0; u < 10; ++u) {
        users.emplace_back("u" + std::to_string(u), 2);
    }
    const auto corpus = corpus_with_counts(users);

    const auto all = select_background(corpus, 10, 1);
    CHECK(all.background.user_count() == 10);
    CHECK(all.remainder.empty());

    const auto none = select_background(corpus, 0, 1);
    CHECK(none.background.empty());
    CHECK(none.remainder == corpus);

    const auto a = select_background(corpus, 3, 42);
    const auto b = select_background(corpus, 3, 42);
    CHECK(a.background == b.background);
    CHECK(a.remainder == b.remainder);
    CHECK(a.background.user_count() == 3);

    std::set<std::string> seen;
    for (const auto& id : a.background.user_ids()) {
        CHECK(seen.insert(id).second);
    }
    for (const auto& id : a.remainder.user_ids()) {
        CHECK(seen.insert(id).second);
    }
    CHECK(seen.size() == 10);

    CHECK_THROWS_AS(select_background(corpus, 11, 1), DataError);
}

TEST_CASE("chronological_split: train prefix, test suffix of the subsample") {
    std::vector<ImageRecord> records;
    for (int i = 0; i < 150; ++i) {
        records.push_back(rec("u", "i" + std::to_string(1000 + i), i));
    }
    SplitSpec plan{100, 50, 50, 7};
    const auto split = chronological_split(records, plan);
    REQUIRE(split.train.size() == 50);
    REQUIRE(split.test.size() == 50);
    CHECK(std::is_sorted(split.train.begin(), split.train.end(), chronologically_before));
    CHECK(std::is_sorted(split.test.begin(), split.test.end(), chronologically_before));
    CHECK(split.train.back().timestamp < split.test.front().timestamp);

    plan.train_size = 10;
    const auto short_split = chronological_split(records, plan);
    REQUIRE(short_split.train.size() == 10);
    CHECK(std::equal(short_split.train.begin(), short_split.train.end(), split.train.begin()));
    CHECK(short_split.test == split.test);

    CHECK(chronological_split(records, plan).train == short_split.train);
}

TEST_CASE("chronological_split: capacity and errors") {
    std::vector<ImageRecord> records;
    for (int i = 0; i < 100; ++i) {
        records.push_back(rec("cap", "i" + std::to_string(100 + i), i));
    }
    const auto split = chronological_split(records, SplitSpec{100, 50, 50, 3});
    CHECK(std::equal(split.train.begin(), split.train.end(), records.begin()));
    CHECK(std::equal(split.test.begin(), split.test.end(), records.begin() + 50));

    records.pop_back();
    try {
        chronological_split(records, SplitSpec{100, 50, 50, 3});
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("cap") != std::string::npos);
    }
    CHECK_THROWS_AS(SplitSpec({10, 6, 6, 0}).validate(), DataError);
    CHECK_THROWS_AS(SplitSpec({10, 0, 6, 0}).validate(), DataError);
}

TEST_CASE("chronological_split: train ends before test begins for random data") {
    Rng rng(5);
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<ImageRecord> records;
        const std::size_t n = 20 + rng.index(40);
        for (std::size_t i = 0; i < n; ++i) {
            records.push_back(rec("r", "i" + std::to_string(i), static_cast<std::int64_t>(i * 7 + 3)));
        }
        rng.shuffle(records);
        std::sort(records.begin(), records.end(), chronologically_before);
        const SplitSpec plan{20, 1 + rng.index(10), 1 + rng.index(10), rng.index(1000)};
        const auto split = chronological_split(records, plan);
        CHECK(split.train.back().timestamp <= split.test.front().timestamp);
        for (const auto& t : split.train) {
            CHECK(std::find(split.test.begin(), split.test.end(), t) == split.test.end());
        }
    }
}
