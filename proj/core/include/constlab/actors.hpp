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

// Actor registry types and activity admission rules.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "constlab/astrodynamics.hpp"
#include "constlab/kernel.hpp"
#include "constlab/links.hpp"
#include "constlab/resources.hpp"

namespace constlab {

class UnknownActor : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

enum class ActorKind : std::uint8_t { Spacecraft, GroundStation };

std::string_view to_string(ActorKind kind) noexcept;

struct SpacecraftResources {
    BatteryState battery;
    SolarPanel panel;
    ThermalNode thermal;
    RadiationModel radiation;
    double idle_load = 1.0; ///< baseline electrical load [W]
    double idle_heat = 1.0; ///< baseline internal dissipation [W]
};

struct Device {
    std::string name;
    bool failed = false;
};

struct Actor {
    ActorId id = 0;
    std::string name;
    std::variant<KeplerianElements, GroundStation> position;
    std::optional<SpacecraftResources> resources; ///< spacecraft only
    std::vector<LinkSpec> links;
    std::vector<Device> devices;

    ActorKind kind() const noexcept {
        return std::holds_alternative<KeplerianElements>(position) ? ActorKind::Spacecraft
                                                                   : ActorKind::GroundStation;
    }
    bool is_spacecraft() const noexcept { return kind() == ActorKind::Spacecraft; }
    const KeplerianElements &orbit() const { return std::get<KeplerianElements>(position); }
    const GroundStation &station() const { return std::get<GroundStation>(position); }
    bool has_working_device() const noexcept;
    /// First link of the given kind, if any.
    std::optional<LinkSpec> link(LinkKind kind) const;
};

/// Throws std::invalid_argument naming the violated invariant.
void validate(const Actor &actor, const CentralBody &body);

/// Inertial position of an actor at time t.
Vec3 actor_position(const Actor &actor, const CentralBody &body, double t);

/// Link used between two actors: the spacecraft's space-to-ground link for
/// a spacecraft/station pair, or the slower of both inter-satellite links.
/// Empty if the pair cannot communicate.
std::optional<LinkSpec> link_between(const Actor &a, const Actor &b);

struct ActivityPreconditions {
    std::optional<double> min_charge_fraction;
    bool temperature_in_limits = true;
    std::optional<ActorId> requires_window_with;
};

struct Activity {
    std::string name;
    double duration = 0.0; ///< [s]
    double power = 0.0;    ///< electrical load on top of the idle load [W]
    double heat = 0.0;     ///< internal dissipation on top of idle heat [W]
    ActivityPreconditions preconditions;
};

/// Throws std::invalid_argument unless duration > 0 and power >= 0.
void validate(const Activity &activity);

/// Activity whose load draws `energy_per_inference * inferences` joules
/// spread evenly over `duration`.
Activity inference_activity(std::string name, double duration, double energy_per_inference,
                            std::uint64_t inferences, double heat_fraction = 1.0);

enum class RefusalReason : std::uint8_t { None, Busy, Window, Power, Thermal, DeviceFailed };

std::string_view to_string(RefusalReason reason) noexcept;

struct Admission {
    bool accepted = false;
    RefusalReason reason = RefusalReason::None;
    std::string detail;

    static Admission accept() { return {true, RefusalReason::None, {}}; }
    static Admission refuse(RefusalReason r, std::string detail) { return {false, r, std::move(detail)}; }
};

enum class ActivityStatus : std::uint8_t { Scheduled, Running, Completed, Aborted };

std::string_view to_string(ActivityStatus s) noexcept;

/// Full state of one actor at one instant.
struct ActorSnapshot {
    ActorId id = 0;
    std::string name;
    double time = 0.0;
    Vec3 position;
    int illuminated = 1;
    double charge = 0.0;      ///< [J], 0 for ground stations
    double temperature = 0.0; ///< [K], 0 for ground stations
    std::string running_activity; ///< empty when idle
    std::size_t pending_transfers = 0;
    std::size_t failed_devices = 0;

    friend bool operator==(const ActorSnapshot &, const ActorSnapshot &) = default;
};

} // namespace constlab
