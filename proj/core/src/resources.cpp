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

#include "constlab/resources.hpp"

#include <algorithm>
#include <cmath>

namespace constlab {

std::string_view to_string(FaultType type) noexcept {
    switch (type) {
    case FaultType::Corruption: return "corruption";
    case FaultType::Restart: return "restart";
    case FaultType::Failure: return "failure";
    }
    return "unknown";
}

BatteryState integrate_power(BatteryState b, const SolarPanel &panel, int nu, double flux,
                             double load, double dt) {
    if (!(dt > 0.0)) {
        return b;
    }
    const double net = static_cast<double>(nu) * panel.power(flux) - load;
    b.charge = std::clamp(b.charge + net * dt, 0.0, b.capacity);
    return b;
}

std::optional<double> time_to_empty(const BatteryState &b, const SolarPanel &panel, int nu,
                                    double flux, double load, double dt) {
    const double net = static_cast<double>(nu) * panel.power(flux) - load;
    if (net >= 0.0) {
        return std::nullopt;
    }
    const double t = b.charge / -net;
    if (t <= dt) {
        return t;
    }
    return std::nullopt;
}

double thermal_rate(const ThermalNode &node, int nu, double internal_heat, double temp) noexcept {
    const double t2 = temp * temp;
    const double q = static_cast<double>(nu) * node.absorbed_solar + internal_heat -
                     node.rad_coeff * t2 * t2;
    return q / node.heat_capacity;
}

ThermalNode integrate_thermal(ThermalNode node, int nu, double internal_heat, double dt) {
    if (!(dt > 0.0)) {
        return node;
    }
    const double initial_rate = std::abs(thermal_rate(node, nu, internal_heat, node.temperature));
    const auto substeps = std::max<long long>(1, static_cast<long long>(std::ceil(initial_rate * dt / 1.0)));
    const double h = dt / static_cast<double>(substeps);

    double T = node.temperature;
    for (long long s = 0; s < substeps; ++s) {
        const double k1 = thermal_rate(node, nu, internal_heat, T);
        const double k2 = thermal_rate(node, nu, internal_heat, T + 0.5 * h * k1);
        const double k3 = thermal_rate(node, nu, internal_heat, T + 0.5 * h * k2);
        const double k4 = thermal_rate(node, nu, internal_heat, T + h * k3);
        T += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    node.temperature = T;
    return node;
}

double thermal_equilibrium(const ThermalNode &node, double total_heat) noexcept {
    return std::pow(total_heat / node.rad_coeff, 0.25);
}

double thermal_time_constant(const ThermalNode &node, double temp) noexcept {
    return node.heat_capacity / (4.0 * node.rad_coeff * temp * temp * temp);
}

std::uint32_t fault_stream_purpose(FaultType type) noexcept {
    return 0x100u + static_cast<std::uint32_t>(type);
}

std::uint32_t fault_effect_purpose(FaultType type) noexcept {
    return 0x200u + static_cast<std::uint32_t>(type);
}

std::vector<FaultEvent> sample_faults(const RadiationModel &model, std::vector<SeededRng> &streams,
                                      double dt) {
    const double rates[3] = {model.rate_corruption, model.rate_restart, model.rate_failure};
    std::vector<FaultEvent> out;
    if (!(dt > 0.0)) {
        return out;
    }
    for (std::size_t k = 0; k < 3 && k < streams.size(); ++k) {
        if (!(rates[k] > 0.0)) {
            continue;
        }
        // Exponential inter-arrival gaps give a Poisson(rate * dt) count.
        double t = streams[k].exponential(rates[k]);
        while (t < dt) {
            out.push_back({t, static_cast<FaultType>(k)});
            t += streams[k].exponential(rates[k]);
        }
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const FaultEvent &a, const FaultEvent &b) { return a.time < b.time; });
    return out;
}

std::vector<FaultEvent> sample_faults(const RadiationModel &model, std::uint64_t seed, ActorId actor,
                                      double dt) {
    std::vector<SeededRng> streams;
    for (auto type : {FaultType::Corruption, FaultType::Restart, FaultType::Failure}) {
        streams.emplace_back(seed, stream_id(actor, fault_stream_purpose(type)));
    }
    return sample_faults(model, streams, dt);
}

} // namespace constlab
