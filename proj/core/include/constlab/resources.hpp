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

// Per-spacecraft power, thermal and radiation-fault models.

#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "constlab/kernel.hpp"

namespace constlab {

struct BatteryState {
    double capacity = 0.0;         ///< [J]
    double charge = 0.0;           ///< [J]
    double discharge_floor = 0.2;  ///< fraction of capacity

    double floor_energy() const noexcept { return discharge_floor * capacity; }
    double fraction() const noexcept { return capacity > 0.0 ? charge / capacity : 0.0; }
};

struct SolarPanel {
    double area = 0.0;       ///< [m^2]
    double efficiency = 0.3; ///< (0, 1]

    /// Electrical output at full illumination [W].
    double power(double flux) const noexcept { return flux * area * efficiency; }
};

struct ThermalNode {
    double heat_capacity = 0.0;   ///< [J/K]
    double temperature = 293.15;  ///< [K]
    double rad_coeff = 0.0;       ///< effective emissivity * sigma * area [W/K^4]
    double absorbed_solar = 0.0;  ///< [W] when illuminated
    double t_min = 0.0;           ///< [K]
    double t_max = 1e9;           ///< [K]

    bool in_limits() const noexcept { return temperature >= t_min && temperature <= t_max; }
};

struct RadiationModel {
    double rate_corruption = 0.0; ///< [1/s]
    double rate_restart = 0.0;    ///< [1/s]
    double rate_failure = 0.0;    ///< [1/s]
};

enum class FaultType : std::uint8_t { Corruption, Restart, Failure };

std::string_view to_string(FaultType type) noexcept;

struct FaultEvent {
    double time = 0.0; ///< offset within the sampled interval [s]
    FaultType type = FaultType::Corruption;
};

/// Battery charge after dt seconds of constant illumination and load:
/// clamp(charge + (nu * flux * area * eff - load) * dt, 0, capacity).
BatteryState integrate_power(BatteryState b, const SolarPanel &panel, int nu, double flux,
                             double load, double dt);

/// Time in [0, dt] at which the battery empties under the given constant
/// rates, or nullopt if it does not.
std::optional<double> time_to_empty(const BatteryState &b, const SolarPanel &panel, int nu,
                                    double flux, double load, double dt);

/// Net rate of temperature change [K/s] at temperature `temp`.
double thermal_rate(const ThermalNode &node, int nu, double internal_heat, double temp) noexcept;

/// Advances the lumped node with RK4, splitting dt into substeps so that the
/// estimated per-substep change stays within 1 K.
ThermalNode integrate_thermal(ThermalNode node, int nu, double internal_heat, double dt);

/// Radiative equilibrium (Q / rad_coeff)^(1/4) for a total heat input Q.
double thermal_equilibrium(const ThermalNode &node, double total_heat) noexcept;

/// Linearised time constant C / (4 k T^3) around `temp` [s].
double thermal_time_constant(const ThermalNode &node, double temp) noexcept;

/// Fault arrivals over [0, dt]. Each type is an independent Poisson process
/// drawn from its own stream; the per-type count is Poisson(rate * dt).
/// Streams are indexed by FaultType order.
std::vector<FaultEvent> sample_faults(const RadiationModel &model, std::vector<SeededRng> &streams,
                                      double dt);

/// Convenience overload that derives the three streams from (seed, actor).
std::vector<FaultEvent> sample_faults(const RadiationModel &model, std::uint64_t seed, ActorId actor,
                                      double dt);

/// Stream purposes reserved for the fault processes of one actor. Arrival
/// times and fault effects (which bit, which device) use separate streams so
/// the arrival sequence does not depend on what each fault hit.
std::uint32_t fault_stream_purpose(FaultType type) noexcept;
std::uint32_t fault_effect_purpose(FaultType type) noexcept;

} // namespace constlab
