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

// Record-oriented facade for scripting front ends. Every result is a
// self-contained JSON text rendered exactly like the CLI artifacts, so a
// binding only has to parse JSON and never holds simulator internals.
// Calls on one session are serialized by an internal mutex.

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "constlab/scenario.hpp"
#include "constlab/simulation.hpp"

namespace constlab {

class SessionClosed : public std::logic_error {
public:
    SessionClosed() : std::logic_error("session is closed") {}
};

class ScenarioNotFound : public ScenarioError {
public:
    using ScenarioError::ScenarioError;
};

/// JSON object with id, name, time, position_m, illuminated, charge_J,
/// temperature_K, running_activity, pending_transfers, failed_devices.
std::string to_json(const ActorSnapshot &s);

class Session {
public:
    /// Throws ScenarioNotFound for a missing file and ScenarioError for an
    /// invalid one.
    static Session load(const std::filesystem::path &scenario, std::optional<std::uint64_t> seed = std::nullopt);
    static Session from_scenario(const Scenario &scenario, std::optional<std::uint64_t> seed = std::nullopt);

    Session(Session &&) noexcept;
    Session &operator=(Session &&) noexcept;
    ~Session();

    /// Advances the clock by `seconds` and returns the executed events as
    /// JSON lines (the events.jsonl rendering).
    std::vector<std::string> advance(double seconds);
    /// Runs one round and returns its rounds.jsonl line.
    std::string run_round();
    std::string snapshot(ActorId id) const;
    /// Actor ids by declaration order.
    std::vector<std::string> actor_names() const;
    double now() const;

    void close();
    bool closed() const;

    /// Direct access for in-process callers; throws SessionClosed.
    const Simulation &simulation() const;

private:
    explicit Session(Simulation sim);
    Simulation &sim();
    const Simulation &sim() const;

    std::unique_ptr<std::mutex> mutex_;
    std::optional<Simulation> sim_;
};

} // namespace constlab
