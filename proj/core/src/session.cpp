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

#include "constlab/session.hpp"

#include "json.hpp"

namespace constlab {

namespace {

nlohmann::ordered_json number(double v) { return nlohmann::ordered_json::parse(format_double(v)); }

} // namespace

std::string to_json(const ActorSnapshot &s) {
    nlohmann::ordered_json j;
    j["id"] = s.id;
    j["name"] = s.name;
    j["time"] = number(s.time);
    j["position_m"] = {number(s.position.x), number(s.position.y), number(s.position.z)};
    j["illuminated"] = s.illuminated;
    j["charge_J"] = number(s.charge);
    j["temperature_K"] = number(s.temperature);
    j["running_activity"] = s.running_activity;
    j["pending_transfers"] = s.pending_transfers;
    j["failed_devices"] = s.failed_devices;
    return j.dump();
}

Session::Session(Simulation sim) : mutex_(std::make_unique<std::mutex>()), sim_(std::move(sim)) {}
Session::Session(Session &&) noexcept = default;
Session &Session::operator=(Session &&) noexcept = default;
Session::~Session() = default;

Session Session::load(const std::filesystem::path &scenario, std::optional<std::uint64_t> seed) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(scenario, ec)) {
        throw ScenarioNotFound({{"", scenario.string(), 0, "scenario file not found"}});
    }
    return from_scenario(load_scenario(scenario), seed);
}

Session Session::from_scenario(const Scenario &scenario, std::optional<std::uint64_t> seed) {
    return Session(build_simulation(scenario, seed));
}

Simulation &Session::sim() {
    if (!sim_) {
        throw SessionClosed();
    }
    return *sim_;
}

const Simulation &Session::sim() const {
    if (!sim_) {
        throw SessionClosed();
    }
    return *sim_;
}

std::vector<std::string> Session::advance(double seconds) {
    std::lock_guard lock(*mutex_);
    auto &s = sim();
    std::vector<std::string> out;
    for (const auto &e : s.advance_by(seconds)) {
        out.push_back(to_jsonl(e));
    }
    return out;
}

std::string Session::run_round() {
    std::lock_guard lock(*mutex_);
    return to_jsonl(sim().run_round());
}

std::string Session::snapshot(ActorId id) const {
    std::lock_guard lock(*mutex_);
    return to_json(sim().snapshot(id));
}

std::vector<std::string> Session::actor_names() const {
    std::lock_guard lock(*mutex_);
    std::vector<std::string> out;
    for (const auto &a : sim().actors()) {
        out.push_back(a.name);
    }
    return out;
}

double Session::now() const {
    std::lock_guard lock(*mutex_);
    return sim().now();
}

void Session::close() {
    std::lock_guard lock(*mutex_);
    sim_.reset();
}

bool Session::closed() const {
    std::lock_guard lock(*mutex_);
    return !sim_;
}

const Simulation &Session::simulation() const { return sim(); }

} // namespace constlab
