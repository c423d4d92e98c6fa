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

// The constellation simulator: one kernel, a registry of actors, their
// resource models, the contact-window schedule, the transfer ledger and the
// federated-learning round orchestrator.
//
// Geometry (contact windows, eclipse intervals) is precomputed over the
// configured horizon at construction; the clock cannot advance past it.

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "constlab/actors.hpp"
#include "constlab/astrodynamics.hpp"
#include "constlab/fedlearn.hpp"
#include "constlab/kernel.hpp"
#include "constlab/links.hpp"

namespace constlab {

struct SimulationConfig {
    CentralBody body;
    SunModel sun;
    double horizon = 86400.0;         ///< [s]
    double step = 1.0;                ///< resource integration step [s]
    double coarse_step = 10.0;        ///< window search sampling [s]
    double telemetry_cadence = 60.0;  ///< [s]; 0 disables telemetry
    std::uint64_t seed = 0;
};

/// Throws std::invalid_argument naming the offending field.
void validate(const SimulationConfig &cfg);

struct TelemetryRow {
    double time = 0.0;
    ActorId actor = 0;
    double charge = 0.0;      ///< [J]
    double temperature = 0.0; ///< [K]
    int illuminated = 1;

    friend bool operator==(const TelemetryRow &, const TelemetryRow &) = default;
};

inline constexpr std::string_view kTelemetryCsvHeader = "time,charge_J,temperature_K,illuminated";
std::string to_csv_row(const TelemetryRow &row);

struct ActivityLogRow {
    double time = 0.0;
    ActorId actor = 0;
    std::string activity;
    std::string status; ///< start | end | aborted | refused
    std::string reason;

    friend bool operator==(const ActivityLogRow &, const ActivityLogRow &) = default;
};

inline constexpr std::string_view kActivityCsvHeader = "time,actor_id,activity,status,reason";
std::string to_csv_row(const ActivityLogRow &row);

/// Visibility predicate for a pair: elevation mask for spacecraft/station,
/// unoccluded segment for two spacecraft. Throws std::invalid_argument for
/// two ground stations.
bool pair_visible(const Actor &a, const Actor &b, const CentralBody &body, double t);

/// Contact windows of a pair over [t0, t1].
std::vector<Window> pair_windows(const Actor &a, const Actor &b, const CentralBody &body, double t0,
                                 double t1, double coarse_step);

/// Shadow intervals of a spacecraft over [t0, t1]; peer_a = peer_b = id.
std::vector<Window> eclipse_intervals(const Actor &sc, const CentralBody &body, const SunModel &sun,
                                      double t0, double t1, double coarse_step);

struct FederatedSetup {
    RoundPlan plan;
    std::vector<ClientDataset> datasets; ///< one per plan.clients entry, same order
    ParamVector initial;
};

class Simulation {
public:
    using ActivityCallback = std::function<void(ActivityStatus status, double at, std::string_view reason)>;

    /// Validates everything, precomputes windows and eclipse intervals over
    /// [0, cfg.horizon], and seeds the fault processes. Actor ids must be
    /// 0..n-1 in order.
    Simulation(SimulationConfig cfg, std::vector<Actor> actors);
    ~Simulation();
    Simulation(Simulation &&) noexcept;
    Simulation &operator=(Simulation &&) noexcept;

    const SimulationConfig &config() const noexcept;
    double now() const noexcept;

    const std::vector<Actor> &actors() const noexcept;
    const Actor &actor(ActorId id) const;
    ActorId id_of(std::string_view name) const;

    /// Runs every event up to t and integrates resources across the gaps.
    /// Throws std::out_of_range past the horizon.
    std::vector<EventRecord> advance_to(double t);
    std::vector<EventRecord> advance_by(double dt) { return advance_to(now() + dt); }

    /// Admission control for an activity starting at `start` (>= now).
    /// Checks run in a fixed order: busy, window, power, thermal, device.
    /// The power check projects the battery over [now, start + duration]
    /// with the same step and eclipse sampling as the integrator; touching
    /// the discharge floor exactly is accepted.
    Admission register_activity(ActorId id, const Activity &activity, double start,
                                ActivityCallback on_end = {});

    /// Schedules an admission request to be evaluated when the clock
    /// reaches `at`.
    void request_activity_at(ActorId id, Activity activity, double at);

    /// Applies a restart fault at the current time: aborts the running
    /// activity (reason radiation_restart) or logs a no-op.
    void abort_on_fault(ActorId id);

    ActorSnapshot snapshot(ActorId id) const;
    /// State at the most recent recorded instant <= t (t <= now).
    ActorSnapshot snapshot(ActorId id, double t) const;

    /// Precomputed windows between two actors, ordered by t_open.
    std::vector<Window> windows(ActorId a, ActorId b) const;
    std::vector<Window> all_windows() const;
    std::vector<Window> eclipses(ActorId id) const;
    bool in_window(ActorId a, ActorId b, double t) const;

    /// Queues `bytes` from src to dst on their shared link (FIFO, half
    /// duplex per actor). `on_complete` receives the delivered buffer.
    std::uint64_t request_transfer(ActorId src, ActorId dst, std::vector<std::uint8_t> bytes,
                                   std::function<void(std::vector<std::uint8_t> &)> on_complete = {});
    /// Sent bytes of a transfer so far.
    Transfer transfer(std::uint64_t id) const;

    void configure_federated(FederatedSetup setup);
    /// Starts plan.rounds chained rounds at the current time.
    void start_rounds();
    /// Runs one round to completion or timeout and returns its report.
    RoundReport run_round();
    const std::vector<RoundReport> &round_reports() const noexcept;
    const ParamVector &global_model() const;
    std::uint32_t completed_rounds() const noexcept;

    const std::vector<EventRecord> &event_log() const noexcept;
    const std::vector<TelemetryRow> &telemetry() const noexcept;
    const std::vector<ActivityLogRow> &activity_log() const noexcept;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace constlab
