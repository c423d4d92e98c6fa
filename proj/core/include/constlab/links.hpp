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

// Visibility geometry, contact-window search and bandwidth-limited
// transfers.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "constlab/astrodynamics.hpp"
#include "constlab/kernel.hpp"

namespace constlab {

struct GroundStation {
    double lat = 0.0; ///< [rad]
    double lon = 0.0; ///< [rad], at t = 0
    double alt = 0.0; ///< [m]
    double min_elevation = deg2rad(10.0);
};

enum class LinkKind : std::uint8_t { SpaceToGround, InterSatellite };

std::string_view to_string(LinkKind kind) noexcept;

struct LinkSpec {
    std::string name;
    double bitrate = 0.0; ///< [bit/s]
    LinkKind kind = LinkKind::SpaceToGround;
    double grazing_altitude = 1e5; ///< ISL occlusion margin [m]
};

namespace presets {
/// S-band downlink of a 6U hyperspectral CubeSat, 1 Mbit/s.
LinkSpec hypso1_sband();
/// X-band downlink of a 6U experiment CubeSat, 50 Mbit/s.
LinkSpec opssat_xband();
/// Looks up a named preset (HYPSO1_SBAND, OPSSAT_XBAND, ISL_DEFAULT).
std::optional<LinkSpec> link_by_name(std::string_view name);
} // namespace presets

struct Window {
    ActorId peer_a = 0;
    ActorId peer_b = 0;
    double t_open = 0.0;
    double t_close = 0.0;

    double duration() const noexcept { return t_close - t_open; }
    bool contains(double t) const noexcept { return t >= t_open && t <= t_close; }
    friend bool operator==(const Window &, const Window &) = default;
};

/// Byte-counted payload movement between two actors.
struct Transfer {
    ActorId src = 0;
    ActorId dst = 0;
    std::uint64_t total_bytes = 0;
    std::uint64_t sent_bytes = 0;
    LinkSpec link;

    bool complete() const noexcept { return sent_bytes >= total_bytes; }
    std::uint64_t remaining() const noexcept { return total_bytes - sent_bytes; }
};

/// Station position in the inertial frame; the body rotates about +z.
Vec3 station_position(const GroundStation &gs, const CentralBody &body, double t);

/// Elevation [rad] of `r_sat` above the station's local horizon.
double elevation(const Vec3 &r_sat, const GroundStation &gs, const CentralBody &body, double t);

/// True iff the segment r1-r2 stays at least radius + margin from the body
/// centre, using the closest point clamped to the segment.
bool isl_visible(const Vec3 &r1, const Vec3 &r2, const CentralBody &body, double margin) noexcept;

using VisibilityPredicate = std::function<bool(double t)>;

inline constexpr double kEdgeTolerance = 1e-3; ///< window edge refinement [s]

/// Maximal intervals in [t0, t1] on which `visible` holds. The predicate is
/// sampled on the absolute grid k * coarse_step (plus both span ends); each
/// sampled sign change is bisected to kEdgeTolerance. Visibility intervals
/// shorter than coarse_step can fall between samples and be missed.
std::vector<Window> find_windows(ActorId a, ActorId b, const VisibilityPredicate &visible,
                                 double t0, double t1, double coarse_step);

/// Advances a transfer by `overlap` seconds of window time: sent_bytes
/// grows by floor(bitrate * overlap / 8), clamped to total_bytes.
Transfer step_transfer(Transfer tr, double overlap);

/// Window time needed to move `bytes` on `link` [s].
double transfer_duration(std::uint64_t bytes, const LinkSpec &link) noexcept;

/// Window report rows: peer_a, peer_b, t_open_s, t_close_s, duration_s.
inline constexpr std::string_view kWindowCsvHeader = "peer_a,peer_b,t_open_s,t_close_s,duration_s";
std::string to_csv_row(const Window &w, std::string_view name_a, std::string_view name_b);

} // namespace constlab
