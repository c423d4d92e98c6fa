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

#include "constlab/actors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace constlab {

std::string_view to_string(ActorKind kind) noexcept {
    return kind == ActorKind::Spacecraft ? "spacecraft" : "ground_station";
}

bool Actor::has_working_device() const noexcept {
    if (devices.empty()) {
        return true;
    }
    return std::any_of(devices.begin(), devices.end(), [](const Device &d) { return !d.failed; });
}

std::optional<LinkSpec> Actor::link(LinkKind kind) const {
    for (const auto &l : links) {
        if (l.kind == kind) {
            return l;
        }
    }
    return std::nullopt;
}

void validate(const Actor &actor, const CentralBody &body) {
    if (actor.is_spacecraft()) {
        validate(actor.orbit(), body);
        if (!actor.resources) {
            throw std::invalid_argument("spacecraft needs battery, panel and thermal models");
        }
        const auto &r = *actor.resources;
        if (!(r.battery.capacity > 0.0)) {
            throw std::invalid_argument("battery capacity must be > 0");
        }
        if (!(r.battery.charge >= 0.0 && r.battery.charge <= r.battery.capacity)) {
            throw std::invalid_argument("battery charge must lie in [0, capacity]");
        }
        if (!(r.battery.discharge_floor >= 0.0 && r.battery.discharge_floor <= 1.0)) {
            throw std::invalid_argument("discharge_floor must lie in [0, 1]");
        }
        if (!(r.panel.area > 0.0)) {
            throw std::invalid_argument("panel area must be > 0");
        }
        if (!(r.panel.efficiency > 0.0 && r.panel.efficiency <= 1.0)) {
            throw std::invalid_argument("panel efficiency must lie in (0, 1]");
        }
        if (!(r.thermal.temperature > 0.0)) {
            throw std::invalid_argument("temperature must be > 0 K");
        }
        if (!(r.thermal.heat_capacity > 0.0)) {
            throw std::invalid_argument("heat capacity must be > 0");
        }
        if (!(r.thermal.rad_coeff >= 0.0)) {
            throw std::invalid_argument("radiative coefficient must be >= 0");
        }
        if (!(r.radiation.rate_corruption >= 0.0 && r.radiation.rate_restart >= 0.0 &&
              r.radiation.rate_failure >= 0.0)) {
            throw std::invalid_argument("radiation fault rates must be >= 0");
        }
        if (!(r.idle_load >= 0.0)) {
            throw std::invalid_argument("idle load must be >= 0");
        }
    } else {
        const auto &gs = actor.station();
        if (!(std::abs(gs.lat) <= std::numbers::pi / 2.0)) {
            throw std::invalid_argument("station latitude must lie in [-90, 90] deg");
        }
        if (!(gs.min_elevation >= 0.0 && gs.min_elevation < std::numbers::pi / 2.0)) {
            throw std::invalid_argument("station min_elevation must lie in [0, 90) deg");
        }
    }
    for (const auto &l : actor.links) {
        if (!(l.bitrate > 0.0)) {
            throw std::invalid_argument("link '" + l.name + "' bitrate must be > 0");
        }
    }
}

Vec3 actor_position(const Actor &actor, const CentralBody &body, double t) {
    if (actor.is_spacecraft()) {
        return elements_to_cartesian(actor.orbit(), body, t).r;
    }
    return station_position(actor.station(), body, t);
}

std::optional<LinkSpec> link_between(const Actor &a, const Actor &b) {
    if (a.is_spacecraft() && b.is_spacecraft()) {
        auto la = a.link(LinkKind::InterSatellite);
        auto lb = b.link(LinkKind::InterSatellite);
        if (!la || !lb) {
            return std::nullopt;
        }
        return la->bitrate <= lb->bitrate ? la : lb;
    }
    if (a.is_spacecraft() != b.is_spacecraft()) {
        const Actor &sat = a.is_spacecraft() ? a : b;
        const Actor &gs = a.is_spacecraft() ? b : a;
        auto l = sat.link(LinkKind::SpaceToGround);
        if (!l || (!gs.links.empty() && !gs.link(LinkKind::SpaceToGround))) {
            return std::nullopt;
        }
        return l;
    }
    return std::nullopt;
}

void validate(const Activity &activity) {
    if (!(activity.duration > 0.0) || !std::isfinite(activity.duration)) {
        throw std::invalid_argument("activity '" + activity.name + "' duration must be > 0");
    }
    if (!(activity.power >= 0.0)) {
        throw std::invalid_argument("activity '" + activity.name + "' power must be >= 0");
    }
    if (!(activity.heat >= 0.0)) {
        throw std::invalid_argument("activity '" + activity.name + "' heat must be >= 0");
    }
}

Activity inference_activity(std::string name, double duration, double energy_per_inference,
                            std::uint64_t inferences, double heat_fraction) {
    Activity a;
    a.name = std::move(name);
    a.duration = duration;
    a.power = energy_per_inference * static_cast<double>(inferences) / duration;
    a.heat = a.power * heat_fraction;
    return a;
}

std::string_view to_string(RefusalReason reason) noexcept {
    switch (reason) {
    case RefusalReason::None: return "";
    case RefusalReason::Busy: return "busy";
    case RefusalReason::Window: return "requires_window";
    case RefusalReason::Power: return "power";
    case RefusalReason::Thermal: return "thermal";
    case RefusalReason::DeviceFailed: return "device_failed";
    }
    return "unknown";
}

std::string_view to_string(ActivityStatus s) noexcept {
    switch (s) {
    case ActivityStatus::Scheduled: return "scheduled";
    case ActivityStatus::Running: return "running";
    case ActivityStatus::Completed: return "end";
    case ActivityStatus::Aborted: return "aborted";
    }
    return "unknown";
}

} // namespace constlab
