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


// Actor builders shared by the unit tests and the acceptance runner.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "constlab/actors.hpp"
#include "constlab/links.hpp"

namespace fixture {

inline constlab::SpacecraftResources quiet_resources() {
    constlab::SpacecraftResources r;
    r.battery = {100000.0, 60000.0, 0.2};
    r.panel = {0.1, 0.3};
    r.thermal.heat_capacity = 5000.0;
    r.thermal.temperature = 290.0;
    r.thermal.rad_coeff = 5.67e-8 * 0.8 * 0.2;
    r.thermal.absorbed_solar = 5.0;
    r.thermal.t_min = 150.0;
    r.thermal.t_max = 400.0;
    r.idle_load = 1.0;
    r.idle_heat = 1.0;
    return r;
}

inline constlab::Actor spacecraft(constlab::ActorId id, std::string name, constlab::KeplerianElements el,
                                  std::vector<constlab::LinkSpec> links = {constlab::presets::hypso1_sband()}) {
    constlab::Actor a;
    a.id = id;
    a.name = std::move(name);
    a.position = el;
    a.resources = quiet_resources();
    a.links = std::move(links);
    return a;
}

inline constlab::Actor station(constlab::ActorId id, std::string name, double lat_deg, double lon_deg,
                               double min_elev_deg = 10.0) {
    constlab::Actor a;
    a.id = id;
    a.name = std::move(name);
    constlab::GroundStation gs;
    gs.lat = constlab::deg2rad(lat_deg);
    gs.lon = constlab::deg2rad(lon_deg);
    gs.min_elevation = constlab::deg2rad(min_elev_deg);
    a.position = gs;
    return a;
}

/// 500 km circular polar orbit.
inline constlab::KeplerianElements polar_leo(double M0_deg = 0.0, double raan_deg = 0.0) {
    return {constlab::earth::kRadius + 5e5, 0.0, constlab::deg2rad(90.0), constlab::deg2rad(raan_deg), 0.0,
            constlab::deg2rad(M0_deg)};
}

} // namespace fixture
