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

#include "constlab/io.hpp"

#include <fstream>
#include <stdexcept>

namespace constlab {

void write_file_atomic(const std::filesystem::path &path, std::string_view content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            throw std::runtime_error("write to " + tmp.string() + " failed");
        }
    }
    std::filesystem::rename(tmp, path);
}

std::string render_events_jsonl(std::span<const EventRecord> events) {
    std::string out;
    for (const auto &e : events) {
        out += to_jsonl(e);
        out += '\n';
    }
    return out;
}

std::string render_events_csv(std::span<const EventRecord> events) {
    std::string out(kEventCsvHeader);
    out += '\n';
    for (const auto &e : events) {
        out += to_csv_row(e);
        out += '\n';
    }
    return out;
}

std::string render_telemetry_csv(std::span<const TelemetryRow> rows, ActorId actor) {
    std::string out(kTelemetryCsvHeader);
    out += '\n';
    for (const auto &r : rows) {
        if (r.actor == actor) {
            out += to_csv_row(r);
            out += '\n';
        }
    }
    return out;
}

std::string render_windows_csv(std::span<const Window> windows, const std::vector<Actor> &actors) {
    std::string out(kWindowCsvHeader);
    out += '\n';
    for (const auto &w : windows) {
        out += to_csv_row(w, actors.at(w.peer_a).name, actors.at(w.peer_b).name);
        out += '\n';
    }
    return out;
}

std::string render_rounds_jsonl(std::span<const RoundReport> reports) {
    std::string out;
    for (const auto &r : reports) {
        out += to_jsonl(r);
        out += '\n';
    }
    return out;
}

std::string render_activities_csv(std::span<const ActivityLogRow> rows) {
    std::string out(kActivityCsvHeader);
    out += '\n';
    for (const auto &r : rows) {
        out += to_csv_row(r);
        out += '\n';
    }
    return out;
}

namespace {

std::string telemetry_file(const Actor &a) { return "telemetry_" + a.name + ".csv"; }

} // namespace

std::vector<std::string> run_output_files(const Simulation &sim) {
    std::vector<std::string> files = {"events.jsonl", "events.csv", "windows.csv", "rounds.jsonl",
                                      "activities.csv"};
    for (const auto &a : sim.actors()) {
        if (a.is_spacecraft()) {
            files.push_back(telemetry_file(a));
        }
    }
    return files;
}

void write_run_outputs(const Simulation &sim, const std::filesystem::path &dir) {
    std::filesystem::create_directories(dir);
    const auto &log = sim.event_log();
    write_file_atomic(dir / "events.jsonl", render_events_jsonl(log));
    write_file_atomic(dir / "events.csv", render_events_csv(log));
    const auto windows = sim.all_windows();
    write_file_atomic(dir / "windows.csv", render_windows_csv(windows, sim.actors()));
    write_file_atomic(dir / "rounds.jsonl", render_rounds_jsonl(sim.round_reports()));
    write_file_atomic(dir / "activities.csv", render_activities_csv(sim.activity_log()));
    for (const auto &a : sim.actors()) {
        if (a.is_spacecraft()) {
            write_file_atomic(dir / telemetry_file(a), render_telemetry_csv(sim.telemetry(), a.id));
        }
    }
}

} // namespace constlab
