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
#include <numbers>
#include <vector>

#include <benchmark/benchmark.h>

#include "constlab/fedlearn.hpp"
#include "constlab/float16.hpp"
#include "constlab/simulation.hpp"
#include "fixtures.hpp"

using namespace constlab;

namespace {

void BM_SolveKepler(benchmark::State &state) {
    const double e = static_cast<double>(state.range(0)) / 100.0;
    double M = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_kepler(M, e));
        M += 0.37;
    }
}
BENCHMARK(BM_SolveKepler)->Arg(0)->Arg(10)->Arg(95);

void BM_PairWindows24h(benchmark::State &state) {
    const auto sat = fixture::spacecraft(0, "sat", fixture::polar_leo());
    const auto gs = fixture::station(1, "gs", 78.23, 15.41);
    const CentralBody body;
    for (auto _ : state) {
        benchmark::DoNotOptimize(pair_windows(sat, gs, body, 0.0, 86400.0, 10.0));
    }
}
BENCHMARK(BM_PairWindows24h)->Unit(benchmark::kMillisecond);

void BM_QuantizeFp16(benchmark::State &state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    ParamVector v{std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        v.values[i] = std::sin(static_cast<double>(i)) * 100.0;
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(quantize(v, 0));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_QuantizeFp16)->Arg(1 << 10)->Arg(1 << 20);

void BM_FedAvg(benchmark::State &state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::vector<WeightedUpdate> ups;
    for (std::uint64_t k = 0; k < 8; ++k) {
        ups.push_back({ParamVector{std::vector<double>(n, static_cast<double>(k))}, 100 + k});
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(fedavg(ups));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n * ups.size()));
}
BENCHMARK(BM_FedAvg)->Arg(1 << 10)->Arg(1 << 18);

void BM_SimulateOneDay(benchmark::State &state) {
    const auto sat = fixture::spacecraft(0, "sat", fixture::polar_leo());
    const auto gs = fixture::station(1, "gs", 78.23, 15.41);
    SimulationConfig cfg;
    cfg.horizon = 86400.0;
    for (auto _ : state) {
        Simulation sim(cfg, {sat, gs});
        sim.request_activity_at(0, {"classify", 600.0, 5.0, 2.0, {}}, 3600.0);
        sim.advance_to(cfg.horizon);
        benchmark::DoNotOptimize(sim.event_log().size());
    }
}
BENCHMARK(BM_SimulateOneDay)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
