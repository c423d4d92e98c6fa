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

// Scenario files: TOML tables with units in the field names (a_m,
// power_w, ...). Degrees in files, radians in memory.
//
//   [meta]         name, t0, seed
//   [body]         mu_m3_s2, radius_m, rotation_rate_rad_s
//   [sun]          s0, plane_normal, omega_rad_s, flux_w_m2
//   [simulation]   horizon_s, step_s, coarse_step_s, telemetry_cadence_s
//   [[link_presets]], [[device_presets]], [[actors]], [[activities]]
//   [fedlearn]     server, clients, quorum, ... (see README)
//
// Parsing is all-or-nothing: every problem found is reported with its
// field path and file:line, and no partial scenario is returned.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "constlab/actors.hpp"
#include "constlab/compute_energy.hpp"
#include "constlab/fedlearn.hpp"
#include "constlab/simulation.hpp"

namespace constlab {

struct Diagnostic {
    std::string path;   ///< e.g. actors[1].orbit.a_m
    std::string source; ///< file name
    std::size_t line = 0; ///< 0 when unknown
    std::string message;

    /// "file:line: path: message"
    std::string str() const;
};

class ScenarioError : public std::runtime_error {
public:
    explicit ScenarioError(std::vector<Diagnostic> diagnostics);
    const std::vector<Diagnostic> &diagnostics() const noexcept { return diagnostics_; }

private:
    std::vector<Diagnostic> diagnostics_;
};

struct ScheduledActivity {
    ActorId actor = 0;
    Activity activity;
    double start = 0.0; ///< [s]
};

struct FederatedScenario {
    RoundPlan plan;
    std::size_t dim = 8;
    std::size_t samples_per_client = 256;
    double noise_std = 0.1;
    std::uint64_t data_seed = 0;
};

struct Scenario {
    std::string name;
    std::string t0; ///< calendar label only
    SimulationConfig config;
    std::vector<Actor> actors;
    std::vector<ScheduledActivity> activities;
    std::optional<FederatedScenario> fedlearn;
};

/// Throws ScenarioError.
Scenario parse_scenario(std::string_view text, std::string source_name = "<scenario>");
/// Throws ScenarioError, including for a missing or unreadable file.
Scenario load_scenario(const std::filesystem::path &path);

/// IID shards of one synthetic pooled dataset plus a zero initial model.
FederatedSetup make_federated_setup(const FederatedScenario &fed);

/// Builds the simulation, registers the scheduled activities and configures
/// federated learning. `seed` overrides meta.seed when given.
Simulation build_simulation(const Scenario &scenario, std::optional<std::uint64_t> seed = std::nullopt);

} // namespace constlab
