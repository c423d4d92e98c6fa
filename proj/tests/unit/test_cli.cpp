// Copyright 2026 The constlab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Drives the installed command-line tool as a child process.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "doctest.h"

#ifdef CONSTLAB_CLI_PATH

namespace fs = std::filesystem;

namespace {

const std::string kRoot = CONSTLAB_SOURCE_DIR;

struct Outcome {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string &leaf) {
    auto p = fs::temp_directory_path() / ("constlab_cli_" + leaf);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

Outcome cli(const std::string &args) {
    const auto dir = fs::temp_directory_path();
    const auto out = dir / "constlab_cli_stdout.txt";
    const auto err = dir / "constlab_cli_stderr.txt";
    const std::string cmd = std::string("\"") + CONSTLAB_CLI_PATH + "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                            err.string() + "\"";
    const int status = std::system(cmd.c_str());
    Outcome o;
    o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    o.out = slurp(out);
    o.err = slurp(err);
    return o;
}

std::size_t count_lines(const std::string &s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

} // namespace

TEST_SUITE("cli") {

TEST_CASE("run writes every artifact; telemetry has one row per cadence step") {
    const auto dir = scratch("run");
    const auto o = cli("run --scenario " + kRoot + "/scenarios/minimal.toml --until 6000 --out " + dir.string());
    REQUIRE(o.code == 0);
    for (const char *f : {"events.jsonl", "events.csv", "windows.csv", "rounds.jsonl", "activities.csv",
                          "telemetry_sat0.csv"}) {
        CHECK_MESSAGE(fs::exists(dir / f), f);
    }
    // Header plus rows at 0, 60, ..., 6000.
    CHECK(count_lines(slurp(dir / "telemetry_sat0.csv")) == 1 + 101);
}

TEST_CASE("reruns are byte-identical; a different seed is not") {
    const auto a = scratch("rerun_a");
    const auto b = scratch("rerun_b");
    const auto c = scratch("rerun_c");
    const std::string base = "run --scenario " + kRoot + "/scenarios/minimal.toml --until 86400 --out ";
    REQUIRE(cli(base + a.string()).code == 0);
    REQUIRE(cli(base + b.string()).code == 0);
    REQUIRE(cli(base + c.string() + " --seed 8").code == 0);
    for (const char *f : {"events.jsonl", "events.csv", "windows.csv", "activities.csv", "telemetry_sat0.csv"}) {
        CHECK_MESSAGE(slurp(a / f) == slurp(b / f), f);
    }
    CHECK(slurp(a / "events.jsonl") != slurp(c / "events.jsonl"));
}

TEST_CASE("an invalid scenario exits 2 and names the field") {
    const auto o = cli("run --scenario " + kRoot + "/tests/data/invalid_negative_a.toml --until 10 --out " +
                       scratch("invalid").string());
    CHECK(o.code == 2);
    CHECK(o.err.find("actors[0].orbit.a_m") != std::string::npos);
    CHECK(o.err.find("invalid_negative_a.toml:7") != std::string::npos);
    CHECK(cli("run --scenario " + kRoot + "/scenarios/minimal.toml --until 1e9 --out " + scratch("late").string())
              .code == 2);
    CHECK(cli("run --scenario " + kRoot + "/missing.toml --until 1 --out " + scratch("m").string()).code == 2);
}

TEST_CASE("usage errors exit 1") {
    CHECK(cli("").code == 1);
    CHECK(cli("run --until 5").code == 1);
    CHECK(cli("frobnicate").code == 1);
    CHECK(cli("--help").code == 0);
}

TEST_CASE("windows prints the pair's contacts as CSV") {
    const auto o = cli("windows --scenario " + kRoot + "/scenarios/minimal.toml --pair sat0,svalbard --span 0,86400");
    REQUIRE(o.code == 0);
    CHECK(o.out.rfind("peer_a,peer_b,t_open_s,t_close_s,duration_s\n", 0) == 0);
    CHECK(count_lines(o.out) > 5);
    CHECK(o.out.find("\nsat0,svalbard,") != std::string::npos);
    CHECK(cli("windows --scenario " + kRoot + "/scenarios/minimal.toml --pair sat0,nobody --span 0,100").code == 2);
    CHECK(cli("windows --scenario " + kRoot + "/scenarios/minimal.toml --pair sat0,svalbard --span 5,5").code == 2);
}

TEST_CASE("score prints kappa and the loss") {
    CHECK(cli("score --matrix " + kRoot + "/tests/data/kappa_2x2.csv").out == "kappa=0.400000 L=0.600000\n");
    CHECK(cli("score --matrix " + kRoot + "/tests/data/diagonal_3x3.csv").out == "kappa=1.000000 L=0.000000\n");
    CHECK(cli("score --matrix " + kRoot + "/tests/data/single_column.csv").out == "kappa=0.000000 L=1.000000\n");
    const auto bad = cli("score --matrix " + kRoot + "/tests/data/malformed.csv");
    CHECK(bad.code == 2);
    CHECK(bad.err.find("line 2") != std::string::npos);
    CHECK(cli("score --matrix " + kRoot + "/tests/data/none.csv").code == 2);
}

}

#endif
