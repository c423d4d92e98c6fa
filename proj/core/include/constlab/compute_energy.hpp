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

// Inference energy proxy. Per layer, synaptic energy is
//
//     E_s = E_o * sum_N(S_N) * f_in * N_t * dt
//
// and neuron-update energy is E_n = E_u * N_n * N_t. A model's energy is the
// sum of both terms over its layers. Conventional (non-spiking) networks are
// the special case f_in = 1 / dt, N_t = 1.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace constlab {

struct LayerSpec {
    std::uint64_t n_neurons = 0;                    ///< N_n
    std::vector<std::uint64_t> synapses_per_neuron; ///< S_N, one entry per neuron (or a single total)
    double mean_rate = 0.0;                         ///< f_in [1/s]
    std::uint32_t timesteps = 1;                    ///< N_t
    double dt = 1.0;                                ///< timestep width [s]

    /// Layer of a conventional network: f_in = 1 / dt and N_t = 1.
    static LayerSpec artificial(std::uint64_t n_neurons, std::vector<std::uint64_t> synapses,
                                double dt = 1.0);
};

struct DevicePreset {
    std::string name;
    double e_synop = 0.0;  ///< E_o [J per synaptic operation]
    double e_update = 0.0; ///< E_u [J per neuron update]
    /// Measured whole-inference energy [J], when the preset carries one.
    std::optional<double> energy_per_inference;
};

/// Throws std::invalid_argument if the layer or device violates its invariants.
void validate(const LayerSpec &layer);
void validate(const DevicePreset &dev);

double synaptic_energy(const LayerSpec &layer, const DevicePreset &dev);
double neuron_energy(const LayerSpec &layer, const DevicePreset &dev);
/// Sum of synaptic and neuron energy over a non-empty list of layers.
double model_energy(std::span<const LayerSpec> layers, const DevicePreset &dev);

namespace presets {
/// Whole-inference energies of a small classifier on a GPU and on a
/// neuromorphic chip, for spiking and non-spiking variants.
const std::vector<DevicePreset> &device_presets();
std::optional<DevicePreset> device_by_name(std::string_view name);
} // namespace presets

} // namespace constlab
