#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "vizpref/common.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int status;
    std::string output;
};

Run run_cli(const std::string& args, const fs::path& dir) {
    const fs::path log = dir / "cli.log";
    const std::string cmd = "cd '" + dir.string() + "' && '" VIZPREF_CLI_PATH "' " + args + " > '" + log.string() +
                            "' 2>&1";
    const int raw = std::system(cmd.c_str());
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, ss.str()};
}

std::vector<std::string> data_lines(const fs::path& path) {
    std::ifstream in(path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '#') {
            lines.push_back(line);
        }
    }
    return lines;
}

fs::path fresh_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("vizpref_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("usage errors exit 2 and name the missing flag") {
    const auto dir = fresh_dir("usage");
    const auto missing = run_cli("embed --out e.jsonl", dir);
    CHECK(missing.status == 2);
    CHECK(missing.output.find("--corpus") != std::string::npos);

    CHECK(run_cli("", dir).status == 2);
    CHECK(run_cli("synth --out c.jsonl --no-such-flag 3", dir).status == 2);
    CHECK(run_cli("embed --corpus absent.jsonl --out e.jsonl", dir).status == 2);
    CHECK(run_cli("--help", dir).status == 0);
}

TEST_CASE("data and numeric errors map to exit codes 3 and 4") {
    const auto dir = fresh_dir("codes");
    vizpref::write_text_file(dir / "bad.jsonl", "{\"user_id\":\"u\"}\n");
    const auto bad = run_cli("embed --corpus bad.jsonl --out e.jsonl", dir);
    CHECK(bad.status == 3);
    CHECK(bad.output.find("line 1") != std::string::npos);

    // Every background image identical: bandwidth is undefined.
    std::string same;
    for (int u = 0; u < 3; ++u) {
        for (int i = 0; i < 4; ++i) {
            same += "{\"user_id\":\"u" + std::to_string(u) + "\",\"image_id\":\"i" + std::to_string(i) +
                    "\",\"timestamp\":" + std::to_string(i) + ",\"label\":null,\"features\":[1.0,2.0]}\n";
        }
    }
    vizpref::write_text_file(dir / "same.jsonl", same);
    const auto flat = run_cli("cluster --corpus same.jsonl --model-out m.json --background-out b.json "
                              "--background-users 3 -k 1",
                              dir);
    CHECK(flat.status == 4);
}

TEST_CASE("pipeline on a small synthetic corpus") {
    const auto dir = fresh_dir("pipeline");
    REQUIRE(run_cli("--seed 3 synth --out c.jsonl --users 30 --images 60 --groups 30", dir).status == 0);
    REQUIRE(run_cli("--seed 3 embed --corpus c.jsonl --out e.jsonl", dir).status == 0);
    const auto clustered = run_cli("--seed 3 cluster --corpus e.jsonl --model-out m.json --background-out bg.json "
                                   "--background-users 20 -k 8 --cutoff 6",
                                   dir);
    REQUIRE_MESSAGE(clustered.status == 0, clustered.output);
    REQUIRE(run_cli("--seed 3 profile --corpus e.jsonl --model m.json --out p.csv", dir).status == 0);

    SUBCASE("compare on ten users gives 45 pairs") {
        const auto cmp = run_cli("--seed 3 compare --profiles p.csv --background bg.json --out pairs.csv "
                                 "--ecdf-out ecdf.csv",
                                 dir);
        REQUIRE_MESSAGE(cmp.status == 0, cmp.output);
        CHECK(data_lines(dir / "pairs.csv").size() == 46);
        CHECK(data_lines(dir / "ecdf.csv").front() == "value,fraction");
        CHECK(data_lines(dir / "ecdf.csv").back().ends_with(",1"));
    }
    SUBCASE("predict reports one row per train size") {
        const auto pred = run_cli("--seed 3 predict --corpus e.jsonl --model m.json --out pred.csv "
                                  "--sample-size 60 --test-size 10",
                                  dir);
        REQUIRE_MESSAGE(pred.status == 0, pred.output);
        const auto rows = data_lines(dir / "pred.csv");
        REQUIRE(rows.size() == 6);
        CHECK(rows[1].starts_with("10,"));
        CHECK(rows[5].starts_with("50,"));
    }
    SUBCASE("outputs carry seed and config digest") {
        std::ifstream in(dir / "p.csv");
        std::string first;
        std::getline(in, first);
        CHECK(first.starts_with("# seed=3 config="));
        std::ifstream model(dir / "m.json");
        const auto j = nlohmann::json::parse(model);
        CHECK(j.at("seed") == 3);
        CHECK(j.contains("config_digest"));
        CHECK(j.at("background_users").size() == 20);
    }
}

TEST_CASE("config file supplies values, flags win") {
    const auto dir = fresh_dir("config");
    vizpref::write_text_file(dir / "run.toml", "seed = 5\n[synth]\nusers = 4\nimages = 3\n");
    REQUIRE(run_cli("--config run.toml synth --out a.jsonl", dir).status == 0);
    CHECK(data_lines(dir / "a.jsonl").size() == 12);
    REQUIRE(run_cli("--config run.toml synth --out b.jsonl --users 2", dir).status == 0);
    CHECK(data_lines(dir / "b.jsonl").size() == 6);
}
