// Copyright (C) 2026 The smoothsel authors
// SPDX-License-Identifier: Apache-2.0

#include "cli_config.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;
using namespace smoothsel::cli;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(SMOOTHSEL_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("smoothsel_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("config file parsing") {
    std::istringstream in("# comment\nfamily.name = dose_response  # trailing\n\nalpha=0.1\n");
    const auto entries = parse_config(in);
    REQUIRE(entries.size() == 2);
    CHECK(entries[0].key == "family.name");
    CHECK(entries[0].value == "dose_response");
    CHECK(entries[0].line == 2);
    CHECK(entries[1].value == "0.1");

    std::istringstream dup("alpha = 0.1\nalpha = 0.2\n");
    CHECK_THROWS_AS(parse_config(dup), ConfigError);
    std::istringstream bad("just words\n");
    CHECK_THROWS_AS(parse_config(bad), ConfigError);
    CHECK_THROWS_AS(parse_assignment("a..b=1"), ConfigError);
    CHECK(is_tool_key("input"));
    CHECK_FALSE(is_tool_key("alpha"));
}

TEST_CASE("written tables read back as configs") {
    Table t{"estimate", {"point", "flags"}, {{"0.5", "a,b"}}};
    std::ostringstream out;
    write_table(out, t, {{"command", "estimate"}, {"alpha", "0.05"}});
    const std::string text = out.str();
    CHECK(text.rfind("# smoothsel-csv 1.0\n# table = estimate\n", 0) == 0);
    CHECK(text.find("0.5,\"a,b\"") != std::string::npos);

    std::istringstream back(text);
    const auto entries = parse_config(back);
    REQUIRE(entries.size() == 2);
    CHECK(entries[0].key == "command");
    CHECK(entries[1].key == "alpha");
    CHECK(entries[1].value == "0.05");

    std::istringstream future("# smoothsel-csv 2.0\n# alpha = 0.1\nx\n1\n");
    CHECK_THROWS_AS(parse_config(future), ConfigError);
    std::istringstream minor("# smoothsel-csv 1.7\n# alpha = 0.1\nx\n1\n");
    CHECK(parse_config(minor).size() == 1);
}

TEST_CASE("csv quoting") {
    CHECK(csv_field("plain") == "plain");
    CHECK(csv_field("a,b") == "\"a,b\"");
    CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
}

TEST_CASE("command-line exit codes") {
    TempDir tmp;
    const std::string sample = SMOOTHSEL_DATA_DIR "/density_sample.csv";
    CHECK(run_cli("estimate --input " + sample) == 0);
    CHECK(run_cli("estimate --input " + (tmp.path / "missing.csv").string()) == 3);
    CHECK(run_cli("estimate --input " + sample + " --set bandwdith=0.3") == 2);
    CHECK(run_cli("estimate --input " + sample + " --set split.p1=0.7 --set split.p2=0.3") == 2);
    CHECK(run_cli("estimate") == 2);
    CHECK(run_cli("frobnicate") == 2);
}

TEST_CASE("an emitted CSV reproduces itself") {
    TempDir tmp;
    const std::string sample = SMOOTHSEL_DATA_DIR "/density_sample.csv";
    const fs::path first = tmp.path / "first.csv", second = tmp.path / "second.csv";
    REQUIRE(run_cli("estimate --input " + sample + " --epsilon 0.1 --seed 9 --output " + first.string()) == 0);
    REQUIRE(run_cli("estimate --config " + first.string() + " --output " + second.string()) == 0);
    CHECK(slurp(first) == slurp(second));
    CHECK(slurp(first).find("# epsilon = 0.1\n") != std::string::npos);

    const fs::path sim1 = tmp.path / "sim1.csv", sim2 = tmp.path / "sim2.csv";
    REQUIRE(run_cli("simulate --family dose_response --set sim.n=400 --set sim.reps=2 --output " + sim1.string()) == 0);
    REQUIRE(run_cli("simulate --config " + sim1.string() + " --output " + sim2.string()) == 0);
    CHECK(slurp(sim1) == slurp(sim2));
    CHECK(fs::exists(tmp.path / "sim1.replicates.csv"));
    CHECK(slurp(tmp.path / "sim1.replicates.csv") == slurp(tmp.path / "sim2.replicates.csv"));

    CHECK(run_cli("select --config " + first.string()) == 2);
}
