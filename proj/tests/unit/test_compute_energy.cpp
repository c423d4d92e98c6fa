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


#include <cmath>
#include <vector>

#include "constlab/actors.hpp"
#include "constlab/compute_energy.hpp"
#include "doctest.h"
#include "generators.hpp"

using namespace constlab;

namespace {

LayerSpec spiking(std::uint64_t neurons, std::vector<std::uint64_t> syn, double rate, std::uint32_t nt, double dt) {
    LayerSpec l;
    l.n_neurons = neurons;
    l.synapses_per_neuron = std::move(syn);
    l.mean_rate = rate;
    l.timesteps = nt;
    l.dt = dt;
    return l;
}

} // namespace

TEST_SUITE("compute_energy") {

TEST_CASE("synaptic energy by direct substitution") {
    const DevicePreset dev{"chip", 1e-9, 0.0, std::nullopt};
    const auto layer = spiking(10, {100000}, 10.0, 4, 0.01);
    const double hand = 1e-9 * 100000.0 * 10.0 * 4.0 * 0.01;
    CHECK(synaptic_energy(layer, dev) == hand);
    CHECK(synaptic_energy(layer, dev) == doctest::Approx(4e-5).epsilon(1e-15));
}

TEST_CASE("per-neuron synapse counts are summed") {
    const DevicePreset dev{"chip", 2e-12, 0.0, std::nullopt};
    const auto layer = spiking(3, {10, 20, 70}, 50.0, 8, 0.001);
    CHECK(synaptic_energy(layer, dev) == 2e-12 * 100.0 * 50.0 * 8.0 * 0.001);
}

TEST_CASE("neuron update energy by direct substitution") {
    const DevicePreset dev{"chip", 0.0, 1e-10, std::nullopt};
    const auto layer = spiking(1000, {0}, 0.0, 4, 1.0);
    CHECK(neuron_energy(layer, dev) == 1e-10 * 1000.0 * 4.0);
    CHECK(neuron_energy(layer, dev) == doctest::Approx(4e-7).epsilon(1e-15));
}

TEST_CASE("artificial layers use one timestep at rate 1/dt") {
    const DevicePreset dev{"chip", 3e-11, 5e-12, std::nullopt};
    const auto ann = LayerSpec::artificial(256, {256 * 128}, 0.5);
    CHECK(ann.timesteps == 1);
    CHECK(ann.mean_rate == 2.0);
    CHECK(synaptic_energy(ann, dev) == 3e-11 * 32768.0 * (1.0 / 0.5) * 1.0 * 0.5);
    CHECK(synaptic_energy(ann, dev) == doctest::Approx(3e-11 * 32768.0).epsilon(1e-15));
    CHECK(neuron_energy(ann, dev) == 5e-12 * 256.0);
}

TEST_CASE("a single-layer model is the sum of its two terms") {
    const DevicePreset dev{"chip", 1e-9, 1e-10, std::nullopt};
    const std::vector<LayerSpec> layers{spiking(1000, {100000}, 10.0, 4, 0.01)};
    CHECK(model_energy(layers, dev) == synaptic_energy(layers[0], dev) + neuron_energy(layers[0], dev));
    CHECK_THROWS_AS(model_energy(std::vector<LayerSpec>{}, dev), std::invalid_argument);
}

TEST_CASE("model energy is linear in each device constant") {
    gen::Gen g(51);
    for (std::size_t n = 0; n < 200; ++n) {
        std::vector<LayerSpec> layers;
        for (auto k = g.integer(1, 4); k > 0; --k) {
            layers.push_back(spiking(static_cast<std::uint64_t>(g.integer(1, 5000)),
                                     {static_cast<std::uint64_t>(g.integer(0, 1000000))}, g.uniform(0.0, 200.0),
                                     static_cast<std::uint32_t>(g.integer(1, 16)), g.uniform(1e-4, 1e-1)));
        }
        const double eo = g.uniform(1e-12, 1e-8), eu = g.uniform(1e-12, 1e-8), s = g.uniform(0.1, 10.0);
        const double base = model_energy(layers, {"d", eo, eu, std::nullopt});
        const double only_o = model_energy(layers, {"d", eo, 0.0, std::nullopt});
        const double only_u = model_energy(layers, {"d", 0.0, eu, std::nullopt});
        INFO(gen::where(g, n));
        CHECK(base == doctest::Approx(only_o + only_u).epsilon(1e-12));
        CHECK(model_energy(layers, {"d", s * eo, 0.0, std::nullopt}) == doctest::Approx(s * only_o).epsilon(1e-12));
        CHECK(model_energy(layers, {"d", 0.0, s * eu, std::nullopt}) == doctest::Approx(s * only_u).epsilon(1e-12));
    }
}

TEST_CASE("invalid layers and devices are rejected") {
    const DevicePreset dev{"chip", 1e-9, 1e-10, std::nullopt};
    CHECK_THROWS_AS(synaptic_energy(spiking(1, {1}, -1.0, 1, 1.0), dev), std::invalid_argument);
    CHECK_THROWS_AS(synaptic_energy(spiking(1, {1}, 1.0, 0, 1.0), dev), std::invalid_argument);
    CHECK_THROWS_AS(neuron_energy(spiking(1, {1}, 1.0, 1, 0.0), dev), std::invalid_argument);
    CHECK_THROWS_AS(neuron_energy(spiking(1, {1}, 1.0, 1, 1.0), {"bad", -1.0, 0.0, std::nullopt}),
                    std::invalid_argument);
}

TEST_CASE("measured per-image presets") {
    CHECK(presets::device_by_name("ANN_GPU")->energy_per_inference == 0.06996);
    CHECK(presets::device_by_name("ANN_LOIHI")->energy_per_inference == 0.00636);
    CHECK(presets::device_by_name("SNN_LOIHI")->energy_per_inference == 0.00444);
    CHECK(presets::device_by_name("SNN_PREWITT_LOIHI_LOW_ENERGY")->energy_per_inference == 0.00205);
    CHECK(presets::device_by_name("SNN_PREWITT_LOIHI_HIGH_ACCURACY")->energy_per_inference == 0.00476);
    CHECK_FALSE(presets::device_by_name("TPU"));
    CHECK(presets::device_presets().size() == 5);
}

TEST_CASE("inference activities spread the per-image energy over the duration") {
    const auto a = inference_activity("classify", 60.0, 0.06996, 600, 0.5);
    CHECK(a.power == 0.06996 * 600.0 / 60.0);
    CHECK(a.heat == a.power * 0.5);
    CHECK(a.power * a.duration == doctest::Approx(0.06996 * 600.0).epsilon(1e-15));
}

}
