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

#include "constlab/astrodynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace constlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMaxNewtonIterations = 50;

double kepler_residual(double E, double e, double M) { return E - e * std::sin(E) - M; }

} // namespace

Vec3 SunModel::direction(double t) const noexcept {
    const Vec3 k = normalized(plane_normal);
    return normalized(rotate_about(normalized(s0), k, omega_sun * t));
}

void validate(const CentralBody &body) {
    if (!(body.mu > 0.0) || !std::isfinite(body.mu)) {
        throw InvalidElements("central body mu must be > 0");
    }
    if (!(body.radius > 0.0) || !std::isfinite(body.radius)) {
        throw InvalidElements("central body radius must be > 0");
    }
}

void validate(const KeplerianElements &el, const CentralBody &body) {
    if (!std::isfinite(el.a) || !(el.a > body.radius)) {
        throw InvalidElements("semi-major axis " + std::to_string(el.a) +
                              " m must exceed the body radius " + std::to_string(body.radius) + " m");
    }
    if (!(el.e >= 0.0 && el.e < 1.0)) {
        throw InvalidElements("eccentricity must satisfy 0 <= e < 1");
    }
    if (!std::isfinite(el.i) || !std::isfinite(el.raan) || !std::isfinite(el.argp) ||
        !std::isfinite(el.M0)) {
        throw InvalidElements("orbital angles must be finite");
    }
}

double solve_kepler_bisection(double M, double e) {
    // f(E) = E - e sin E - M is monotone (f' = 1 - e cos E >= 1 - e > 0) and
    // changes sign on [M - e, M + e].
    double lo = M - e;
    double hi = M + e;
    if (e == 0.0) {
        return M;
    }
    for (int k = 0; k < 200 && hi - lo > 0.0; ++k) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) {
            break;
        }
        if (kepler_residual(mid, e, M) < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return std::abs(kepler_residual(lo, e, M)) <= std::abs(kepler_residual(hi, e, M)) ? lo : hi;
}

double solve_kepler(double M, double e) {
    if (!std::isfinite(M)) {
        throw std::invalid_argument("mean anomaly must be finite");
    }
    if (!(e >= 0.0 && e < 1.0)) {
        throw std::invalid_argument("solve_kepler requires 0 <= e < 1");
    }
    if (e == 0.0) {
        return M;
    }
    // Solve on the wrapped anomaly, then shift back by whole turns.
    const double turns = std::floor((M + std::numbers::pi) / kTwoPi);
    const double Mw = M - turns * kTwoPi;

    double E = (e < 0.8) ? Mw + e * std::sin(Mw) : (Mw >= 0.0 ? std::numbers::pi : -std::numbers::pi);
    bool converged = false;
    for (int k = 0; k < kMaxNewtonIterations; ++k) {
        const double f = kepler_residual(E, e, Mw);
        const double fp = 1.0 - e * std::cos(E);
        const double step = f / fp;
        E -= step;
        if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(E))) {
            converged = true;
            break;
        }
    }
    if (!converged || !std::isfinite(E) || std::abs(kepler_residual(E, e, Mw)) > 1e-13) {
        E = solve_kepler_bisection(Mw, e);
    }
    return E + turns * kTwoPi;
}

double mean_motion(const KeplerianElements &el, const CentralBody &body) {
    return std::sqrt(body.mu / (el.a * el.a * el.a));
}

double orbital_period(const KeplerianElements &el, const CentralBody &body) {
    validate(el, body);
    return kTwoPi * std::sqrt(el.a * el.a * el.a / body.mu);
}

CartesianState elements_to_cartesian(const KeplerianElements &el, const CentralBody &body, double t) {
    const double n = mean_motion(el, body);
    const double M = std::fmod(el.M0 + n * t, kTwoPi);
    const double E = solve_kepler(M, el.e);

    const double cosE = std::cos(E);
    const double sinE = std::sin(E);
    const double sq = std::sqrt(1.0 - el.e * el.e);

    // Perifocal position and velocity.
    const double xp = el.a * (cosE - el.e);
    const double yp = el.a * sq * sinE;
    const double rmag = el.a * (1.0 - el.e * cosE);
    const double vfac = std::sqrt(body.mu * el.a) / rmag;
    const double vxp = -vfac * sinE;
    const double vyp = vfac * sq * cosE;

    const double cO = std::cos(el.raan), sO = std::sin(el.raan);
    const double cw = std::cos(el.argp), sw = std::sin(el.argp);
    const double ci = std::cos(el.i), si = std::sin(el.i);

    // Columns P and Q of the perifocal-to-inertial rotation.
    const Vec3 P{cO * cw - sO * sw * ci, sO * cw + cO * sw * ci, sw * si};
    const Vec3 Q{-cO * sw - sO * cw * ci, -sO * sw + cO * cw * ci, cw * si};

    return {P * xp + Q * yp, P * vxp + Q * vyp};
}

int illumination(const Vec3 &r, const Vec3 &s_hat, const CentralBody &body) noexcept {
    const double along = dot(r, s_hat);
    if (along >= 0.0) {
        return 1;
    }
    const Vec3 perp = r - s_hat * along;
    return norm(perp) < body.radius ? 0 : 1;
}

} // namespace constlab
