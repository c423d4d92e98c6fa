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


#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "constlab/io.hpp"
#include "constlab/session.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "json.hpp"

using namespace constlab;
namespace fs = std::filesystem;

namespace {

const std::string kRoot = CONSTLAB_SOURCE_DIR;

fs::path scratch(const std::string &leaf) {
    auto p = fs::temp_directory_path() / ("constlab_unit_" + leaf);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::size_t count_lines(const std::string &s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

} // namespace

TEST_SUITE("io") {

TEST_CASE("atomic writes replace the target and leave no temporary behind") {
    const auto dir = scratch("atomic");
    const auto f = dir / "a.txt";
    write_file_atomic(f, "first\n");
    CHECK(slurp(f) == "first\n");
    write_file_atomic(f, std::string("x\0y", 3));
    CHECK(slurp(f) == std::string("x\0y", 3));
    CHECK_FALSE(fs::exists(dir / "a.txt.tmp"));
    CHECK_THROWS(write_file_atomic(dir / "missing" / "b.txt", "z"));
}

TEST_CASE("renderers emit a header and one line per record") {
    std::vector<EventRecord> evs(2);
    evs[0] = {1.5, 0, EventKind::Fault, {{"type", "restart"}}, 0};
    evs[1] = {2.0, 1, EventKind::WindowOpen, {}, 1};
    CHECK(render_events_jsonl(evs) == to_jsonl(evs[0]) + "\n" + to_jsonl(evs[1]) + "\n");
    const auto csv = render_events_csv(evs);
    CHECK(csv.rfind("time,actor_id,kind,payload\n", 0) == 0);
    CHECK(count_lines(csv) == 3);

    std::vector<TelemetryRow> rows{{0.0, 0, 10.0, 290.0, 1}, {0.0, 1, 5.0, 280.0, 0}, {60.0, 0, 9.5, 291.0, 1}};
    CHECK(render_telemetry_csv(rows, 0) == "time,charge_J,temperature_K,illuminated\n" + to_csv_row(rows[0]) + "\n" +
                                               to_csv_row(rows[2]) + "\n");

    const std::vector<Actor> actors{fixture::spacecraft(0, "a", fixture::polar_leo()),
                                    fixture::station(1, "b", 0.0, 0.0)};
    std::vector<Window> ws{{0, 1, 10.0, 70.0}};
    CHECK(render_windows_csv(ws, actors) == "peer_a,peer_b,t_open_s,t_close_s,duration_s\n" +
                                                to_csv_row(ws[0], "a", "b") + "\n");
    CHECK(render_rounds_jsonl({}).empty());
    CHECK(render_activities_csv({}) == "time,actor_id,activity,status,reason\n");
}

TEST_CASE("run outputs cover every artifact and are reproducible") {
    const auto sc = load_scenario(kRoot + "/scenarios/minimal.toml");
    auto render = [&](const std::string &leaf) {
        auto sim = build_simulation(sc);
        sim.advance_to(7200.0);
        const auto dir = scratch(leaf);
        write_run_outputs(sim, dir);
        return std::pair{dir, run_output_files(sim)};
    };
    const auto [a, files] = render("run_a");
    const auto [b, files_b] = render("run_b");
    CHECK(files == files_b);
    CHECK(std::find(files.begin(), files.end(), "telemetry_sat0.csv") != files.end());
    CHECK(std::find(files.begin(), files.end(), "telemetry_svalbard.csv") == files.end());
    for (const auto &f : files) {
        INFO(f);
        REQUIRE(fs::exists(a / f));
        CHECK(slurp(a / f) == slurp(b / f));
    }
    CHECK(count_lines(slurp(a / "telemetry_sat0.csv")) == 1 + 121);
    for (const auto &entry : fs::directory_iterator(a)) {
        CHECK(entry.path().extension() != ".tmp");
    }
    std::istringstream lines(slurp(a / "events.jsonl"));
    for (std::string line; std::getline(lines, line);) {
        const auto j = nlohmann::json::parse(line);
        CHECK(j.contains("time"));
        CHECK(j.contains("kind"));
    }
}

}

TEST_SUITE("session") {

TEST_CASE("a session loads, advances and reports JSON records") {
    auto s = Session::load(kRoot + "/scenarios/minimal.toml");
    CHECK(s.actor_names() == std::vector<std::string>{"sat0", "svalbard"});
    CHECK(s.now() == 0.0);
    const auto lines = s.advance(1230.0);
    CHECK(s.now() == 1230.0);
    bool saw_start = false;
    for (const auto &l : lines) {
        const auto j = nlohmann::json::parse(l);
        saw_start |= j.at("kind") == "activity-start";
    }
    CHECK(saw_start);
    const auto snap = nlohmann::json::parse(s.snapshot(0));
    for (const char *key : {"id", "name", "time", "position_m", "illuminated", "charge_J", "temperature_K",
                            "running_activity", "pending_transfers", "failed_devices"}) {
        CHECK_MESSAGE(snap.contains(key), key);
    }
    CHECK(snap.at("name") == "sat0");
    CHECK(snap.at("running_activity") == "classify_gpu");
    CHECK(snap.at("position_m").size() == 3);
    CHECK(nlohmann::json::parse(s.snapshot(0)) == snap);
    CHECK_THROWS_AS(s.snapshot(5), UnknownActor);
    CHECK_THROWS_AS(s.advance(1e9), std::out_of_range);
}

TEST_CASE("a missing scenario and a bad scenario are distinguished") {
    CHECK_THROWS_AS(Session::load(kRoot + "/no/such.toml"), ScenarioNotFound);
    try {
        Session::load(kRoot + "/tests/data/invalid_negative_a.toml");
        FAIL("expected a ScenarioError");
    } catch (const ScenarioNotFound &) {
        FAIL("an invalid file is not a missing file");
    } catch (const ScenarioError &e) {
        CHECK(e.diagnostics().at(0).path == "actors[0].orbit.a_m");
    }
}

TEST_CASE("rounds run through the session and a closed session refuses calls") {
    auto s = Session::load(kRoot + "/scenarios/fl_constellation.toml");
    const auto j = nlohmann::json::parse(s.run_round());
    CHECK(j.at("round_id") == 0);
    CHECK(j.at("status") == "completed");
    CHECK(s.simulation().completed_rounds() == 1);
    s.close();
    CHECK(s.closed());
    CHECK_THROWS_AS(s.advance(1.0), SessionClosed);
    CHECK_THROWS_AS(s.snapshot(0), SessionClosed);
    CHECK_THROWS_AS(s.run_round(), SessionClosed);
    CHECK_THROWS_AS(s.simulation(), SessionClosed);
    s.close();
}

TEST_CASE("sessions with the same seed agree and a seed override changes faults") {
    auto a = Session::load(kRoot + "/scenarios/minimal.toml");
    auto b = Session::load(kRoot + "/scenarios/minimal.toml");
    CHECK(a.advance(86400.0) == b.advance(86400.0));
    auto c = Session::load(kRoot + "/scenarios/minimal.toml", 8);
    c.advance(86400.0);
    CHECK(c.simulation().event_log() != a.simulation().event_log());
}

}
