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

// Run artifacts. Every file is rendered in memory and then written through
// a temporary sibling plus rename, so readers never see a partial file.

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "constlab/simulation.hpp"

namespace constlab {

/// Writes `content` to `path` via `path.tmp` and std::filesystem::rename.
/// Throws std::filesystem::filesystem_error or std::runtime_error.
void write_file_atomic(const std::filesystem::path &path, std::string_view content);

std::string render_events_jsonl(std::span<const EventRecord> events);
std::string render_events_csv(std::span<const EventRecord> events);
/// Telemetry of one actor, header time,charge_J,temperature_K,illuminated.
std::string render_telemetry_csv(std::span<const TelemetryRow> rows, ActorId actor);
std::string render_windows_csv(std::span<const Window> windows, const std::vector<Actor> &actors);
std::string render_rounds_jsonl(std::span<const RoundReport> reports);
std::string render_activities_csv(std::span<const ActivityLogRow> rows);

/// Files written by write_run_outputs, relative to the output directory.
std::vector<std::string> run_output_files(const Simulation &sim);

/// Writes events.jsonl, events.csv, telemetry_<actor>.csv per spacecraft,
/// windows.csv, rounds.jsonl and activities.csv into `dir` (created if
/// needed).
void write_run_outputs(const Simulation &sim, const std::filesystem::path &dir);

} // namespace constlab
