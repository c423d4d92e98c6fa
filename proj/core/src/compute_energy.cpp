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

#include "constlab/compute_energy.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace constlab {

LayerSpec LayerSpec::artificial(std::uint64_t n_neurons, std::vector<std::uint64_t> synapses, double dt) {
    LayerSpec layer;
    layer.n_neurons = n_neurons;
    layer.synapses_per_neuron = std::move(synapses);
    layer.mean_rate = 1.0 / dt;
    layer.timesteps = 1;
    layer.dt = dt;
    return layer;
}

void validate(const LayerSpec &layer) {
    if (!(layer.mean_rate >= 0.0) || !std::isfinite(layer.mean_rate)) {
        throw std::invalid_argument("layer mean_rate must be finite and >= 0");
    }
    if (layer.timesteps < 1) {
        throw std::invalid_argument("layer timesteps must be >= 1");
    }
    if (!(layer.dt > 0.0) || !std::isfinite(layer.dt)) {
        throw std::invalid_argument("layer dt must be > 0");
    }
}

void validate(const DevicePreset &dev) {
    if (!(dev.e_synop >= 0.0) || !(dev.e_update >= 0.0)) {
        throw std::invalid_argument("device energies must be >= 0");
    }
    if (dev.energy_per_inference && !(*dev.energy_per_inference >= 0.0)) {
        throw std::invalid_argument("device energy_per_inference must be >= 0");
    }
}

double synaptic_energy(const LayerSpec &layer, const DevicePreset &dev) {
    validate(layer);
    validate(dev);
    const auto synapses = std::accumulate(layer.synapses_per_neuron.begin(),
                                          layer.synapses_per_neuron.end(), std::uint64_t{0});
    return dev.e_synop * static_cast<double>(synapses) * layer.mean_rate *
           static_cast<double>(layer.timesteps) * layer.dt;
}

double neuron_energy(const LayerSpec &layer, const DevicePreset &dev) {
    validate(layer);
    validate(dev);
    return dev.e_update * static_cast<double>(layer.n_neurons) * static_cast<double>(layer.timesteps);
}

double model_energy(std::span<const LayerSpec> layers, const DevicePreset &dev) {
    if (layers.empty()) {
        throw std::invalid_argument("model_energy requires at least one layer");
    }
    double total = 0.0;
    for (const auto &layer : layers) {
        total += synaptic_energy(layer, dev) + neuron_energy(layer, dev);
    }
    return total;
}

namespace presets {

const std::vector<DevicePreset> &device_presets() {
    static const std::vector<DevicePreset> kPresets = {
        {"ANN_GPU", 0.0, 0.0, 0.06996},
        {"ANN_LOIHI", 0.0, 0.0, 0.00636},
        {"SNN_LOIHI", 0.0, 0.0, 0.00444},
        {"SNN_PREWITT_LOIHI_LOW_ENERGY", 0.0, 0.0, 0.00205},
        {"SNN_PREWITT_LOIHI_HIGH_ACCURACY", 0.0, 0.0, 0.00476},
    };
    return kPresets;
}

std::optional<DevicePreset> device_by_name(std::string_view name) {
    for (const auto &p : device_presets()) {
        if (p.name == name) {
            return p;
        }
    }
    return std::nullopt;
}

} // namespace presets

} // namespace constlab
