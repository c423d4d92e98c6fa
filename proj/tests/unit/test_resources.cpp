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

#include "constlab/resources.hpp"
#include "doctest.h"
#include "generators.hpp"

using namespace constlab;

namespace {

ThermalNode cubesat_node() {
    ThermalNode n;
    n.heat_capacity = 3000.0;
    n.temperature = 250.0;
    n.rad_coeff = 5.67e-8 * 0.85 * 0.12;
    n.absorbed_solar = 12.0;
    return n;
}

} // namespace

TEST_SUITE("resources") {

TEST_CASE("eclipse discharge at 10 W for 100 s removes exactly 1000 J") {
    BatteryState b{50000.0, 30000.0, 0.2};
    const SolarPanel panel{0.1, 0.3};
    const auto out = integrate_power(b, panel, 0, 1361.0, 10.0, 100.0);
    CHECK(out.charge == 29000.0);
    CHECK(integrate_power(b, panel, 0, 1361.0, 10.0, 0.0).charge == 30000.0);
}

TEST_CASE("sunlit charging adds nu * flux * area * efficiency - load") {
    BatteryState b{50000.0, 30000.0, 0.2};
    const SolarPanel panel{0.1, 0.3};
    const double net = 1361.0 * 0.1 * 0.3 - 2.0;
    CHECK(integrate_power(b, panel, 1, 1361.0, 2.0, 60.0).charge == 30000.0 + net * 60.0);
}

TEST_CASE("charge is clamped to [0, capacity]") {
    const SolarPanel panel{1.0, 1.0};
    CHECK(integrate_power({1000.0, 990.0, 0.2}, panel, 1, 1361.0, 0.0, 100.0).charge == 1000.0);
    CHECK(integrate_power({1000.0, 10.0, 0.2}, panel, 0, 1361.0, 5.0, 100.0).charge == 0.0);
}

TEST_CASE("battery stays in bounds and partitions add up for random schedules") {
    gen::Gen g(41);
    const SolarPanel panel{0.05, 0.3};
    for (std::size_t n = 0; n < 300; ++n) {
        const double cap = g.uniform(1e3, 1e5);
        BatteryState b{cap, g.uniform(0.0, cap), 0.2};
        const int nu = g.coin() ? 1 : 0;
        const double load = g.uniform(0.0, 40.0);
        const double dt = g.uniform(1.0, 3000.0);
        const auto cuts = g.partition(0.0, dt, 7, false);
        BatteryState piecewise = b;
        double prev = 0.0;
        for (double c : cuts) {
            piecewise = integrate_power(piecewise, panel, nu, 1361.0, load, c - prev);
            REQUIRE(piecewise.charge >= 0.0);
            REQUIRE(piecewise.charge <= cap);
            prev = c;
        }
        piecewise = integrate_power(piecewise, panel, nu, 1361.0, load, dt - prev);
        // Closed form of a constant-rate ODE with saturation at both ends.
        const double closed = std::clamp(b.charge + (nu * panel.power(1361.0) - load) * dt, 0.0, cap);
        INFO(gen::where(g, n));
        CHECK(piecewise.charge == doctest::Approx(closed).epsilon(1e-9).scale(cap));
    }
}

TEST_CASE("time_to_empty is exact inside the step and absent otherwise") {
    const SolarPanel panel{0.1, 0.3};
    BatteryState b{10000.0, 500.0, 0.2};
    const auto t = time_to_empty(b, panel, 0, 1361.0, 10.0, 100.0);
    REQUIRE(t);
    CHECK(*t == 50.0);
    CHECK_FALSE(time_to_empty(b, panel, 0, 1361.0, 10.0, 49.0));
    CHECK_FALSE(time_to_empty(b, panel, 1, 1361.0, 10.0, 1e9));
}

TEST_CASE("equilibrium temperature is a fixed point") {
    auto node = cubesat_node();
    const double q = node.absorbed_solar + 3.0;
    node.temperature = thermal_equilibrium(node, q);
    CHECK(node.rad_coeff * std::pow(node.temperature, 4) == doctest::Approx(q).epsilon(1e-14));
    const auto after = integrate_thermal(node, 1, 3.0, 5000.0);
    CHECK(after.temperature == doctest::Approx(node.temperature).epsilon(1e-12));
}

TEST_CASE("temperature relaxes to within 1% of equilibrium after 10 time constants") {
    for (double start : {120.0, 250.0, 420.0}) {
        auto node = cubesat_node();
        node.temperature = start;
        const double q = node.absorbed_solar + 2.0;
        const double Teq = thermal_equilibrium(node, q);
        const double tau = thermal_time_constant(node, Teq);
        for (int k = 0; k < 1000; ++k) {
            node = integrate_thermal(node, 1, 2.0, 10.0 * tau / 1000.0);
            REQUIRE(node.temperature > 0.0);
        }
        CHECK(std::abs(node.temperature - Teq) <= 0.01 * Teq);
    }
}

TEST_CASE("thermal substepping handles a large step from a hot start") {
    auto node = cubesat_node();
    node.temperature = 2000.0;
    const auto after = integrate_thermal(node, 0, 0.0, 1e5);
    CHECK(after.temperature > 0.0);
    CHECK(after.temperature < 2000.0);
}

TEST_CASE("zero fault rates never produce events") {
    RadiationModel m;
    CHECK(sample_faults(m, 7, 0, 1e9).empty());
}

TEST_CASE("fault samples are sorted, in range, and reproducible per stream") {
    RadiationModel m{1e-3, 5e-4, 1e-4};
    const auto a = sample_faults(m, 9, 2, 86400.0);
    const auto b = sample_faults(m, 9, 2, 86400.0);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].time == b[i].time);
        CHECK(a[i].type == b[i].type);
        CHECK(a[i].time >= 0.0);
        CHECK(a[i].time < 86400.0);
        if (i > 0) {
            CHECK(a[i].time >= a[i - 1].time);
        }
    }
    CHECK(a.size() > 50);
    const auto other_actor = sample_faults(m, 9, 3, 86400.0);
    CHECK((other_actor.size() != a.size() || other_actor.front().time != a.front().time));
    CHECK(fault_stream_purpose(FaultType::Failure) == 0x102);
}

TEST_CASE("fault counts have mean rate * t") {
    RadiationModel m{0.1, 0.0, 0.0};
    double sum = 0.0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        sum += static_cast<double>(sample_faults(m, seed, 0, 1000.0).size());
    }
    CHECK(sum / 200.0 == doctest::Approx(100.0).epsilon(0.05));
}

}
