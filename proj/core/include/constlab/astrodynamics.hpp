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

// Two-body Keplerian propagation and the binary cylindrical-umbra eclipse
// factor. Pure functions over plain data.

#pragma once

#include <numbers>
#include <stdexcept>

#include "constlab/vec3.hpp"

namespace constlab {

namespace earth {
inline constexpr double kMu = 3.986004418e14;        ///< [m^3/s^2]
inline constexpr double kRadius = 6.371e6;           ///< mean radius [m]
inline constexpr double kRotationRate = 7.2921150e-5; ///< sidereal [rad/s]
} // namespace earth

inline constexpr double deg2rad(double deg) noexcept { return deg * std::numbers::pi / 180.0; }
inline constexpr double rad2deg(double rad) noexcept { return rad * 180.0 / std::numbers::pi; }

class InvalidElements : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct CentralBody {
    double mu = earth::kMu;
    double radius = earth::kRadius;
    double rotation_rate = earth::kRotationRate; ///< about inertial +z [rad/s]
};

struct KeplerianElements {
    double a = 0.0;    ///< semi-major axis [m]
    double e = 0.0;    ///< eccentricity, elliptic only
    double i = 0.0;    ///< inclination [rad]
    double raan = 0.0; ///< right ascension of ascending node [rad]
    double argp = 0.0; ///< argument of perigee [rad]
    double M0 = 0.0;   ///< mean anomaly at t = 0 [rad]
};

struct CartesianState {
    Vec3 r; ///< [m]
    Vec3 v; ///< [m/s]
};

/// Direction to a Sun at infinity, rotating uniformly about `plane_normal`.
struct SunModel {
    Vec3 s0{1.0, 0.0, 0.0};
    Vec3 plane_normal{0.0, 0.0, 1.0};
    double omega_sun = 2.0 * std::numbers::pi / (365.25 * 86400.0); ///< [rad/s]
    double flux = 1361.0;                                            ///< [W/m^2]

    /// Unit Sun direction at time t [s].
    Vec3 direction(double t) const noexcept;
};

/// Throws InvalidElements unless mu > 0 and radius > 0.
void validate(const CentralBody &body);

/// Throws InvalidElements if the elements violate 0 <= e < 1, a > radius,
/// or contain non-finite angles.
void validate(const KeplerianElements &el, const CentralBody &body);

/// Solves M = E - e sin E. Newton iteration from a standard starter, with a
/// bisection fallback on [M - e, M + e] if Newton fails to converge.
/// The returned E satisfies |E - e sin E - M| <= 1e-12 for |M| <= 2 pi.
double solve_kepler(double mean_anomaly, double e);

/// Kepler solve by bisection alone; slower, used as the fallback path.
double solve_kepler_bisection(double mean_anomaly, double e);

double mean_motion(const KeplerianElements &el, const CentralBody &body);

/// T = 2 pi sqrt(a^3 / mu).
double orbital_period(const KeplerianElements &el, const CentralBody &body);

/// Inertial state at time t [s] after scenario start.
CartesianState elements_to_cartesian(const KeplerianElements &el, const CentralBody &body, double t);

/// Binary eclipse factor: 0 inside the cylindrical umbra behind the body,
/// 1 otherwise. A perpendicular distance exactly equal to the radius counts
/// as illuminated.
int illumination(const Vec3 &r, const Vec3 &s_hat, const CentralBody &body) noexcept;

} // namespace constlab
