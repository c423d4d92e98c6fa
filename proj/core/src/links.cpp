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

#include "constlab/links.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace constlab {

std::string_view to_string(LinkKind kind) noexcept {
    return kind == LinkKind::SpaceToGround ? "space-to-ground" : "inter-satellite";
}

namespace presets {

LinkSpec hypso1_sband() { return {"HYPSO1_SBAND", 1e6, LinkKind::SpaceToGround, 1e5}; }

LinkSpec opssat_xband() { return {"OPSSAT_XBAND", 5e7, LinkKind::SpaceToGround, 1e5}; }

std::optional<LinkSpec> link_by_name(std::string_view name) {
    if (name == "HYPSO1_SBAND") {
        return hypso1_sband();
    }
    if (name == "OPSSAT_XBAND") {
        return opssat_xband();
    }
    if (name == "ISL_DEFAULT") {
        return LinkSpec{"ISL_DEFAULT", 1e6, LinkKind::InterSatellite, 1e5};
    }
    return std::nullopt;
}

} // namespace presets

Vec3 station_position(const GroundStation &gs, const CentralBody &body, double t) {
    const double rho = body.radius + gs.alt;
    const double lon = gs.lon + body.rotation_rate * t;
    const double cl = std::cos(gs.lat);
    return {rho * cl * std::cos(lon), rho * cl * std::sin(lon), rho * std::sin(gs.lat)};
}

double elevation(const Vec3 &r_sat, const GroundStation &gs, const CentralBody &body, double t) {
    const Vec3 r_gs = station_position(gs, body, t);
    const Vec3 up = normalized(r_gs);
    const Vec3 d = r_sat - r_gs;
    const double dn = norm(d);
    if (dn == 0.0) {
        return std::numbers::pi / 2.0;
    }
    return std::asin(std::clamp(dot(d, up) / dn, -1.0, 1.0));
}

bool isl_visible(const Vec3 &r1, const Vec3 &r2, const CentralBody &body, double margin) noexcept {
    const Vec3 seg = r2 - r1;
    const double len2 = dot(seg, seg);
    double s = 0.0;
    if (len2 > 0.0) {
        s = std::clamp(-dot(r1, seg) / len2, 0.0, 1.0);
    }
    const Vec3 closest = r1 + seg * s;
    return norm(closest) >= body.radius + margin;
}

std::vector<Window> find_windows(ActorId a, ActorId b, const VisibilityPredicate &visible,
                                 double t0, double t1, double coarse_step) {
    if (!(coarse_step > 0.0)) {
        throw std::invalid_argument("coarse_step must be > 0");
    }
    if (!(t1 > t0)) {
        throw std::invalid_argument("window search span must be non-empty");
    }

    // lo has state `lo_state`, hi has the opposite; returns the refined pair.
    auto refine = [&](double lo, double hi, bool lo_state) {
        while (hi - lo > kEdgeTolerance) {
            const double mid = 0.5 * (lo + hi);
            if (visible(mid) == lo_state) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return std::pair{lo, hi};
    };

    std::vector<Window> out;
    double prev_t = t0;
    bool prev_v = visible(t0);
    double open_at = t0;

    auto k = static_cast<long long>(std::floor(t0 / coarse_step)) + 1;
    for (;;) {
        double t = static_cast<double>(k) * coarse_step;
        const bool last = t >= t1;
        if (last) {
            t = t1;
        }
        const bool v = visible(t);
        if (v != prev_v) {
            auto [lo, hi] = refine(prev_t, t, prev_v);
            if (v) {
                open_at = hi;
            } else if (lo > open_at) {
                out.push_back({a, b, open_at, lo});
            }
        }
        prev_t = t;
        prev_v = v;
        if (last) {
            break;
        }
        ++k;
    }
    if (prev_v && t1 > open_at) {
        out.push_back({a, b, open_at, t1});
    }
    return out;
}

Transfer step_transfer(Transfer tr, double overlap) {
    if (!(overlap > 0.0)) {
        return tr;
    }
    const double moved = std::floor(tr.link.bitrate * overlap / 8.0);
    const auto remaining = static_cast<double>(tr.remaining());
    tr.sent_bytes += moved >= remaining ? tr.remaining() : static_cast<std::uint64_t>(moved);
    return tr;
}

double transfer_duration(std::uint64_t bytes, const LinkSpec &link) noexcept {
    return static_cast<double>(bytes) * 8.0 / link.bitrate;
}

std::string to_csv_row(const Window &w, std::string_view name_a, std::string_view name_b) {
    return std::string(name_a) + "," + std::string(name_b) + "," + format_double(w.t_open) + "," +
           format_double(w.t_close) + "," + format_double(w.duration());
}

} // namespace constlab
