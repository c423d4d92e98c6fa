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

#include "constlab/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>
#include <utility>

namespace constlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::pair<ActorId, ActorId> pair_key(ActorId a, ActorId b) {
    return a < b ? std::pair{a, b} : std::pair{b, a};
}

} // namespace

void validate(const SimulationConfig &cfg) {
    validate(cfg.body);
    if (!(cfg.horizon > 0.0) || !std::isfinite(cfg.horizon)) {
        throw std::invalid_argument("simulation.horizon_s must be > 0");
    }
    if (!(cfg.step > 0.0)) {
        throw std::invalid_argument("simulation.step_s must be > 0");
    }
    if (!(cfg.coarse_step > 0.0)) {
        throw std::invalid_argument("simulation.coarse_step_s must be > 0");
    }
    if (!(cfg.telemetry_cadence >= 0.0)) {
        throw std::invalid_argument("simulation.telemetry_cadence_s must be >= 0");
    }
    if (!(cfg.sun.flux >= 0.0)) {
        throw std::invalid_argument("sun.flux_w_m2 must be >= 0");
    }
    if (norm(cfg.sun.s0) == 0.0 || norm(cfg.sun.plane_normal) == 0.0) {
        throw std::invalid_argument("sun direction and plane normal must be non-zero");
    }
}

std::string to_csv_row(const TelemetryRow &row) {
    return format_double(row.time) + "," + format_double(row.charge) + "," +
           format_double(row.temperature) + "," + std::to_string(row.illuminated);
}

std::string to_csv_row(const ActivityLogRow &row) {
    return format_double(row.time) + "," + std::to_string(row.actor) + "," + row.activity + "," +
           row.status + "," + row.reason;
}

bool pair_visible(const Actor &a, const Actor &b, const CentralBody &body, double t) {
    if (a.is_spacecraft() && b.is_spacecraft()) {
        double margin = 1e5;
        auto la = a.link(LinkKind::InterSatellite);
        auto lb = b.link(LinkKind::InterSatellite);
        if (la && lb) {
            margin = std::max(la->grazing_altitude, lb->grazing_altitude);
        } else if (la || lb) {
            margin = la ? la->grazing_altitude : lb->grazing_altitude;
        }
        return isl_visible(actor_position(a, body, t), actor_position(b, body, t), body, margin);
    }
    if (a.is_spacecraft() != b.is_spacecraft()) {
        const Actor &sat = a.is_spacecraft() ? a : b;
        const Actor &gs = a.is_spacecraft() ? b : a;
        const auto r = elements_to_cartesian(sat.orbit(), body, t).r;
        return elevation(r, gs.station(), body, t) >= gs.station().min_elevation;
    }
    throw std::invalid_argument("no visibility model between two ground stations");
}

std::vector<Window> pair_windows(const Actor &a, const Actor &b, const CentralBody &body, double t0,
                                 double t1, double coarse_step) {
    // Evaluate with the lower id first so the predicate, and therefore the
    // refined edges, are identical for (a, b) and (b, a).
    const Actor &lo = a.id <= b.id ? a : b;
    const Actor &hi = a.id <= b.id ? b : a;
    auto pred = [&](double t) { return pair_visible(lo, hi, body, t); };
    return find_windows(a.id, b.id, pred, t0, t1, coarse_step);
}

std::vector<Window> eclipse_intervals(const Actor &sc, const CentralBody &body, const SunModel &sun,
                                      double t0, double t1, double coarse_step) {
    auto shadow = [&](double t) {
        return illumination(actor_position(sc, body, t), sun.direction(t), body) == 0;
    };
    return find_windows(sc.id, sc.id, shadow, t0, t1, coarse_step);
}

struct Simulation::Impl {
    using Action = std::function<void(EventRecord &)>;

    struct RunningActivity {
        Activity activity;
        double start = 0.0;
        double end = 0.0;
        bool started = false;
        std::uint64_t start_seq = 0;
        std::uint64_t end_seq = 0;
        ActivityCallback on_end;
    };

    struct Runtime {
        std::optional<RunningActivity> activity;
        bool blackout = false;
        bool thermal_out = false;
        long long nu_cell = std::numeric_limits<long long>::min();
        int nu = 1;
        std::vector<SeededRng> fault_streams;
        std::vector<SeededRng> effect_streams;
        std::vector<ActorSnapshot> history;
    };

    enum class TransferState : std::uint8_t { Queued, Active, Done, Cancelled };

    struct TransferRec {
        std::uint64_t id = 0;
        Transfer tr;
        std::vector<std::uint8_t> bytes;
        TransferState state = TransferState::Queued;
        double active_since = 0.0;
        double completion_time = kInf;
        std::uint64_t completion_seq = 0;
        bool completion_scheduled = false;
        std::function<void(std::vector<std::uint8_t> &)> on_complete;
        std::function<void(std::uint64_t)> account;
        std::function<void()> on_corrupt;
        std::optional<std::uint32_t> round;
    };

    struct FlClient {
        ActorId id = 0;
        std::uint32_t attempts_up = 0;
        std::uint32_t attempts_down = 0;
        ParamVector received;
        QuantizedPayload update;
        double train_start = 0.0;
    };

    struct FlState {
        FederatedSetup setup;
        ParamVector global;
        std::uint32_t next_round_id = 0;
        std::uint32_t rounds_remaining = 0;
        std::uint32_t completed = 0;
        bool active = false;
        RoundReport report;
        std::vector<WeightedUpdate> updates;
        QuantizedPayload global_payload;
        std::uint64_t timeout_seq = 0;
        bool timeout_scheduled = false;
        std::vector<FlClient> clients;
        std::vector<RoundReport> reports;
    };

    SimulationConfig cfg;
    std::vector<Actor> actors;
    Kernel kernel;
    std::unordered_map<std::uint64_t, Action> actions;
    std::vector<EventRecord> log;
    std::vector<TelemetryRow> telemetry;
    std::vector<ActivityLogRow> activity_log;
    std::vector<Runtime> rt;
    std::vector<double> empty_at;
    std::map<std::pair<ActorId, ActorId>, std::vector<Window>> windows;
    std::vector<std::vector<Window>> eclipses;
    std::vector<TransferRec> transfers;
    std::vector<std::uint64_t> open_transfers; ///< request order
    std::optional<FlState> fl;

    Impl(SimulationConfig c, std::vector<Actor> a) : cfg(std::move(c)), actors(std::move(a)) {
        validate(cfg);
        for (std::size_t i = 0; i < actors.size(); ++i) {
            if (actors[i].id != i) {
                throw std::invalid_argument("actor ids must be 0..n-1 in declaration order");
            }
            validate(actors[i], cfg.body);
        }
        rt.resize(actors.size());
        eclipses.resize(actors.size());

        kernel.set_handler([this](EventRecord &ev) { handle(ev); });
        kernel.set_integrator([this](double from, double to) { return integrate(from, to); });

        schedule_geometry();
        for (std::size_t i = 0; i < actors.size(); ++i) {
            if (actors[i].is_spacecraft()) {
                init_faults(i);
            }
        }
        record_telemetry(0.0);
    }

    // ---- event plumbing ---------------------------------------------------

    std::uint64_t schedule(double t, ActorId actor, EventKind kind, Payload payload, Action action = {}) {
        const auto seq = kernel.schedule({t, actor, kind, std::move(payload), 0});
        if (action) {
            actions.emplace(seq, std::move(action));
        }
        return seq;
    }

    std::uint64_t emit(ActorId actor, EventKind kind, Payload payload, Action action = {}) {
        return schedule(kernel.now(), actor, kind, std::move(payload), std::move(action));
    }

    void cancel(std::uint64_t seq) {
        kernel.cancel(seq);
        actions.erase(seq);
    }

    void handle(EventRecord &ev) {
        auto it = actions.find(ev.seq);
        if (it != actions.end()) {
            Action action = std::move(it->second);
            actions.erase(it);
            action(ev);
        }
        log.push_back(ev);
    }

    const std::string &name(ActorId id) const { return actors.at(id).name; }

    // ---- geometry ---------------------------------------------------------

    void schedule_geometry() {
        for (std::size_t i = 0; i < actors.size(); ++i) {
            for (std::size_t j = i + 1; j < actors.size(); ++j) {
                const Actor &a = actors[i];
                const Actor &b = actors[j];
                if (!link_between(a, b)) {
                    continue;
                }
                auto ws = pair_windows(a, b, cfg.body, 0.0, cfg.horizon, cfg.coarse_step);
                for (const auto &w : ws) {
                    Payload p{{"peer_a", a.name}, {"peer_b", b.name}};
                    const auto ida = a.id;
                    const auto idb = b.id;
                    schedule(w.t_open, ida, EventKind::WindowOpen, p, [this](EventRecord &) { pump(); });
                    if (w.t_close < cfg.horizon) {
                        p.set("duration_s", w.duration());
                        schedule(w.t_close, ida, EventKind::WindowClose, p,
                                 [this, ida, idb](EventRecord &) { on_window_close(ida, idb); });
                    }
                }
                windows.emplace(pair_key(a.id, b.id), std::move(ws));
            }
        }
        for (std::size_t i = 0; i < actors.size(); ++i) {
            if (!actors[i].is_spacecraft()) {
                continue;
            }
            eclipses[i] = eclipse_intervals(actors[i], cfg.body, cfg.sun, 0.0, cfg.horizon, cfg.coarse_step);
            for (const auto &w : eclipses[i]) {
                schedule(w.t_open, actors[i].id, EventKind::EclipseEnter, {});
                if (w.t_close < cfg.horizon) {
                    Payload p;
                    p.set("duration_s", w.duration());
                    schedule(w.t_close, actors[i].id, EventKind::EclipseExit, std::move(p));
                }
            }
        }
    }

    const Window *current_window(ActorId a, ActorId b, double t) const {
        auto it = windows.find(pair_key(a, b));
        if (it == windows.end()) {
            return nullptr;
        }
        const auto &ws = it->second;
        auto w = std::upper_bound(ws.begin(), ws.end(), t,
                                  [](double x, const Window &win) { return x < win.t_open; });
        if (w == ws.begin()) {
            return nullptr;
        }
        --w;
        if (t >= w->t_open && t < w->t_close) {
            return &*w;
        }
        if (t == w->t_close && w->t_close >= cfg.horizon) {
            return &*w;
        }
        return nullptr;
    }

    long long cell_of(double t) const {
        auto cell = static_cast<long long>(std::floor(t / cfg.step));
        if (static_cast<double>(cell + 1) * cfg.step <= t) {
            ++cell;
        }
        return cell;
    }

    int illumination_at(std::size_t i, double t) const {
        return illumination(actor_position(actors[i], cfg.body, t), cfg.sun.direction(t), cfg.body);
    }

    int nu_at(std::size_t i, long long cell) {
        auto &r = rt[i];
        if (r.nu_cell != cell) {
            r.nu_cell = cell;
            r.nu = illumination_at(i, static_cast<double>(cell) * cfg.step);
        }
        return r.nu;
    }

    // ---- resources --------------------------------------------------------

    double load_of(std::size_t i) const {
        const auto &res = *actors[i].resources;
        double load = res.idle_load;
        if (rt[i].activity && rt[i].activity->started) {
            load += rt[i].activity->activity.power;
        }
        return load;
    }

    double heat_of(std::size_t i) const {
        const auto &res = *actors[i].resources;
        double heat = res.idle_heat;
        if (rt[i].activity && rt[i].activity->started) {
            heat += rt[i].activity->activity.heat;
        }
        return heat;
    }

    double integrate(double from, double to) {
        double t = from;
        while (t < to) {
            const long long cell = cell_of(t);
            double b = std::min(to, static_cast<double>(cell + 1) * cfg.step);
            double next_tel = kInf;
            if (cfg.telemetry_cadence > 0.0) {
                next_tel = (std::floor(t / cfg.telemetry_cadence) + 1.0) * cfg.telemetry_cadence;
                if (next_tel <= t) {
                    next_tel += cfg.telemetry_cadence;
                }
                b = std::min(b, next_tel);
            }

            double hit = kInf;
            empty_at.assign(actors.size(), kInf);
            for (std::size_t i = 0; i < actors.size(); ++i) {
                if (!actors[i].is_spacecraft() || rt[i].blackout) {
                    continue;
                }
                const auto &res = *actors[i].resources;
                auto th = time_to_empty(res.battery, res.panel, nu_at(i, cell), cfg.sun.flux, load_of(i), b - t);
                if (th) {
                    empty_at[i] = t + *th;
                    hit = std::min(hit, empty_at[i]);
                }
            }
            if (hit < b) {
                b = hit;
            }
            const double dt = b - t;

            for (std::size_t i = 0; i < actors.size(); ++i) {
                if (!actors[i].is_spacecraft()) {
                    continue;
                }
                auto &res = *actors[i].resources;
                const int nu = nu_at(i, cell);
                res.battery = integrate_power(res.battery, res.panel, nu, cfg.sun.flux, load_of(i), dt);
                // Snap to empty at the crossing so rounding cannot leave a
                // residue whose drain time rounds to a zero-length step.
                if (empty_at[i] <= b) {
                    res.battery.charge = 0.0;
                }
                res.thermal = integrate_thermal(res.thermal, nu, heat_of(i), dt);
            }
            t = b;

            bool interrupted = false;
            for (std::size_t i = 0; i < actors.size(); ++i) {
                if (!actors[i].is_spacecraft()) {
                    continue;
                }
                auto &res = *actors[i].resources;
                auto &r = rt[i];
                if (!r.blackout && res.battery.charge <= 0.0) {
                    r.blackout = true;
                    interrupted = true;
                    const auto id = actors[i].id;
                    schedule(t, id, EventKind::PowerBlackout, {},
                             [this, i](EventRecord &) { abort_activity(i, "power_blackout"); });
                } else if (r.blackout && res.battery.charge > 0.0) {
                    r.blackout = false;
                }
                const bool in_limits = res.thermal.in_limits();
                if (!in_limits && !r.thermal_out) {
                    r.thermal_out = true;
                    interrupted = true;
                    Payload p;
                    p.set("temperature_K", res.thermal.temperature);
                    p.set("limit", res.thermal.temperature > res.thermal.t_max ? "t_max" : "t_min");
                    schedule(t, actors[i].id, EventKind::ThermalViolation, std::move(p));
                } else if (in_limits && r.thermal_out) {
                    r.thermal_out = false;
                }
            }
            if (t == next_tel) {
                record_telemetry(t);
            }
            if (interrupted) {
                return t;
            }
        }
        return to;
    }

    ActorSnapshot make_snapshot(std::size_t i, double t) const {
        const Actor &a = actors[i];
        ActorSnapshot s;
        s.id = a.id;
        s.name = a.name;
        s.time = t;
        s.position = actor_position(a, cfg.body, t);
        const long long cell = cell_of(t);
        s.illuminated = (rt[i].nu_cell == cell) ? rt[i].nu
                                                : illumination_at(i, static_cast<double>(cell) * cfg.step);
        if (a.resources) {
            s.charge = a.resources->battery.charge;
            s.temperature = a.resources->thermal.temperature;
        }
        if (rt[i].activity && rt[i].activity->started) {
            s.running_activity = rt[i].activity->activity.name;
        }
        for (auto id : open_transfers) {
            const auto &tr = transfers[id].tr;
            if (tr.src == a.id || tr.dst == a.id) {
                ++s.pending_transfers;
            }
        }
        s.failed_devices = static_cast<std::size_t>(
            std::count_if(a.devices.begin(), a.devices.end(), [](const Device &d) { return d.failed; }));
        return s;
    }

    void record_telemetry(double t) {
        for (std::size_t i = 0; i < actors.size(); ++i) {
            if (!actors[i].is_spacecraft()) {
                continue;
            }
            auto snap = make_snapshot(i, t);
            telemetry.push_back({t, actors[i].id, snap.charge, snap.temperature, snap.illuminated});
            rt[i].history.push_back(std::move(snap));
        }
    }

    // ---- activities -------------------------------------------------------

    double projected_min_charge(std::size_t i, double start, double end, double power) {
        const auto &res = *actors[i].resources;
        BatteryState b = res.battery;
        double t = kernel.now();
        double lowest = kInf;
        if (t >= start) {
            lowest = b.charge;
        }
        while (t < end) {
            const long long cell = cell_of(t);
            double nb = std::min(end, static_cast<double>(cell + 1) * cfg.step);
            if (t < start) {
                nb = std::min(nb, start);
            }
            const double load = res.idle_load + (t >= start ? power : 0.0);
            const int nu = illumination_at(i, static_cast<double>(cell) * cfg.step);
            b = integrate_power(b, res.panel, nu, cfg.sun.flux, load, nb - t);
            t = nb;
            if (t >= start) {
                lowest = std::min(lowest, b.charge);
            }
        }
        return lowest;
    }

    void log_activity(ActorId id, const std::string &activity, std::string status, std::string reason) {
        activity_log.push_back({kernel.now(), id, activity, std::move(status), std::move(reason)});
    }

    Admission admit(std::size_t i, const Activity &act, double start) {
        const Actor &a = actors[i];
        if (rt[i].activity) {
            return Admission::refuse(RefusalReason::Busy,
                                     "actor already has activity '" + rt[i].activity->activity.name + "'");
        }
        if (act.preconditions.requires_window_with) {
            const auto peer = *act.preconditions.requires_window_with;
            if (peer >= actors.size()) {
                throw UnknownActor("unknown actor id " + std::to_string(peer));
            }
            if (!current_window(a.id, peer, start)) {
                return Admission::refuse(RefusalReason::Window, "no window with " + name(peer));
            }
        }
        if (a.resources) {
            const auto &bat = a.resources->battery;
            if (act.preconditions.min_charge_fraction &&
                bat.fraction() < *act.preconditions.min_charge_fraction) {
                return Admission::refuse(RefusalReason::Power,
                                         "charge fraction " + format_double(bat.fraction()) + " below " +
                                             format_double(*act.preconditions.min_charge_fraction));
            }
            const double lowest = projected_min_charge(i, start, start + act.duration, act.power);
            if (lowest < bat.floor_energy()) {
                return Admission::refuse(RefusalReason::Power, "projected charge " + format_double(lowest) +
                                                                   " J below floor " +
                                                                   format_double(bat.floor_energy()) + " J");
            }
            if (act.preconditions.temperature_in_limits && !a.resources->thermal.in_limits()) {
                return Admission::refuse(RefusalReason::Thermal,
                                         "temperature " + format_double(a.resources->thermal.temperature) +
                                             " K outside limits");
            }
        }
        if (!a.has_working_device()) {
            return Admission::refuse(RefusalReason::DeviceFailed, "all devices failed");
        }
        return Admission::accept();
    }

    Admission register_activity(std::size_t i, const Activity &act, double start, ActivityCallback on_end) {
        validate(act);
        if (start < kernel.now()) {
            throw SchedulingError("activity start is before the clock");
        }
        const ActorId id = actors[i].id;
        auto adm = admit(i, act, start);
        if (!adm.accepted) {
            Payload p{{"activity", act.name}, {"reason", std::string(to_string(adm.reason))}, {"detail", adm.detail}};
            emit(id, EventKind::ActivityRefused, std::move(p));
            log_activity(id, act.name, "refused", std::string(to_string(adm.reason)));
            return adm;
        }
        RunningActivity run;
        run.activity = act;
        run.start = start;
        run.end = start + act.duration;
        run.on_end = std::move(on_end);
        Payload ps{{"activity", act.name}};
        ps.set("power_w", act.power);
        run.start_seq = schedule(start, id, EventKind::ActivityStart, std::move(ps), [this, i](EventRecord &) {
            auto &ra = *rt[i].activity;
            ra.started = true;
            log_activity(actors[i].id, ra.activity.name, "start", "");
        });
        Payload pe{{"activity", act.name}, {"status", "end"}};
        run.end_seq = schedule(run.end, id, EventKind::ActivityEnd, std::move(pe), [this, i](EventRecord &) {
            auto ra = std::move(*rt[i].activity);
            rt[i].activity.reset();
            log_activity(actors[i].id, ra.activity.name, "end", "");
            if (ra.on_end) {
                ra.on_end(ActivityStatus::Completed, kernel.now(), "");
            }
        });
        rt[i].activity = std::move(run);
        return adm;
    }

    /// Ends the running activity early. Returns false if nothing was running.
    bool abort_activity(std::size_t i, const std::string &reason) {
        auto &slot = rt[i].activity;
        if (!slot || !slot->started) {
            return false;
        }
        auto ra = std::move(*slot);
        slot.reset();
        cancel(ra.end_seq);
        const ActorId id = actors[i].id;
        emit(id, EventKind::ActivityEnd, {{"activity", ra.activity.name}, {"status", "aborted"}, {"reason", reason}});
        log_activity(id, ra.activity.name, "aborted", reason);
        if (ra.on_end) {
            ra.on_end(ActivityStatus::Aborted, kernel.now(), reason);
        }
        return true;
    }

    // ---- faults -----------------------------------------------------------

    void init_faults(std::size_t i) {
        auto &r = rt[i];
        for (auto type : {FaultType::Corruption, FaultType::Restart, FaultType::Failure}) {
            r.fault_streams.emplace_back(cfg.seed, stream_id(actors[i].id, fault_stream_purpose(type)));
            r.effect_streams.emplace_back(cfg.seed, stream_id(actors[i].id, fault_effect_purpose(type)));
        }
        for (auto type : {FaultType::Corruption, FaultType::Restart, FaultType::Failure}) {
            schedule_next_fault(i, type);
        }
    }

    double fault_rate(std::size_t i, FaultType type) const {
        const auto &rad = actors[i].resources->radiation;
        switch (type) {
        case FaultType::Corruption: return rad.rate_corruption;
        case FaultType::Restart: return rad.rate_restart;
        case FaultType::Failure: return rad.rate_failure;
        }
        return 0.0;
    }

    void schedule_next_fault(std::size_t i, FaultType type) {
        const double rate = fault_rate(i, type);
        if (!(rate > 0.0)) {
            return;
        }
        auto &stream = rt[i].fault_streams[static_cast<std::size_t>(type)];
        const double t = kernel.now() + stream.exponential(rate);
        if (t > cfg.horizon) {
            return;
        }
        schedule(t, actors[i].id, EventKind::Fault, {{"type", std::string(to_string(type))}},
                 [this, i, type](EventRecord &ev) {
                     apply_fault(i, type, ev.payload);
                     schedule_next_fault(i, type);
                 });
    }

    void apply_fault(std::size_t i, FaultType type, Payload &p) {
        auto &stream = rt[i].effect_streams[static_cast<std::size_t>(type)];
        const ActorId id = actors[i].id;
        switch (type) {
        case FaultType::Corruption: {
            for (auto tid : open_transfers) {
                auto &rec = transfers[tid];
                if (rec.tr.src != id && rec.tr.dst != id) {
                    continue;
                }
                const auto bit = stream.uniform_index(rec.bytes.size() * 8);
                rec.bytes[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
                p.set("effect", "bit_flip");
                p.set("transfer", tid);
                p.set("bit", static_cast<std::uint64_t>(bit));
                p.set("region", bit / 8 < kPayloadHeaderBytes ? "header" : "value");
                if (rec.on_corrupt) {
                    rec.on_corrupt();
                }
                return;
            }
            p.set("effect", "no-op");
            return;
        }
        case FaultType::Restart:
            p.set("effect", abort_activity(i, "radiation_restart") ? "abort" : "no-op");
            return;
        case FaultType::Failure: {
            auto &devs = actors[i].devices;
            std::vector<std::size_t> working;
            for (std::size_t k = 0; k < devs.size(); ++k) {
                if (!devs[k].failed) {
                    working.push_back(k);
                }
            }
            if (working.empty()) {
                p.set("effect", "no-op");
                return;
            }
            const auto pick = working[stream.uniform_index(working.size())];
            devs[pick].failed = true;
            p.set("effect", "device_failed");
            p.set("device", devs[pick].name);
            abort_activity(i, "radiation_failure");
            return;
        }
        }
    }

    // ---- transfers --------------------------------------------------------

    std::uint64_t request_transfer(ActorId src, ActorId dst, std::vector<std::uint8_t> bytes,
                                   std::function<void(std::vector<std::uint8_t> &)> on_complete,
                                   std::optional<std::uint32_t> round = std::nullopt,
                                   std::function<void(std::uint64_t)> account = {},
                                   std::function<void()> on_corrupt = {}) {
        if (src >= actors.size() || dst >= actors.size()) {
            throw UnknownActor("transfer endpoint is not a registered actor");
        }
        auto link = link_between(actors[src], actors[dst]);
        if (!link) {
            throw std::invalid_argument("no link between " + name(src) + " and " + name(dst));
        }
        TransferRec rec;
        rec.id = transfers.size();
        rec.tr = {src, dst, static_cast<std::uint64_t>(bytes.size()), 0, *link};
        rec.bytes = std::move(bytes);
        rec.on_complete = std::move(on_complete);
        rec.round = round;
        rec.account = std::move(account);
        rec.on_corrupt = std::move(on_corrupt);
        transfers.push_back(std::move(rec));
        open_transfers.push_back(transfers.back().id);
        pump();
        return transfers.back().id;
    }

    bool busy(ActorId id) const {
        for (auto tid : open_transfers) {
            const auto &rec = transfers[tid];
            if (rec.state == TransferState::Active && (rec.tr.src == id || rec.tr.dst == id)) {
                return true;
            }
        }
        return false;
    }

    void pump() {
        const double now = kernel.now();
        for (std::size_t k = 0; k < open_transfers.size(); ++k) {
            auto &rec = transfers[open_transfers[k]];
            if (rec.state != TransferState::Queued) {
                continue;
            }
            if (busy(rec.tr.src) || busy(rec.tr.dst)) {
                continue;
            }
            const Window *w = current_window(rec.tr.src, rec.tr.dst, now);
            if (!w) {
                continue;
            }
            rec.state = TransferState::Active;
            rec.active_since = now;
            const auto tid = rec.id;
            Payload ps;
            ps.set("transfer", tid);
            ps.set("dst", name(rec.tr.dst));
            ps.set("remaining_bytes", rec.tr.remaining());
            emit(rec.tr.src, EventKind::TransferStart, std::move(ps));
            const double done_at = now + transfer_duration(rec.tr.remaining(), rec.tr.link);
            rec.completion_time = done_at;
            if (done_at <= w->t_close) {
                Payload pc;
                pc.set("transfer", tid);
                pc.set("src", name(rec.tr.src));
                pc.set("bytes", rec.tr.total_bytes);
                rec.completion_seq = schedule(done_at, rec.tr.dst, EventKind::TransferComplete, std::move(pc),
                                              [this, tid](EventRecord &) { complete_transfer(tid); });
                rec.completion_scheduled = true;
            }
        }
    }

    void close_transfer(std::uint64_t tid) {
        open_transfers.erase(std::find(open_transfers.begin(), open_transfers.end(), tid));
    }

    void complete_transfer(std::uint64_t tid) {
        auto &rec = transfers[tid];
        rec.tr.sent_bytes = rec.tr.total_bytes;
        rec.state = TransferState::Done;
        rec.completion_scheduled = false;
        close_transfer(tid);
        if (rec.account) {
            rec.account(rec.tr.total_bytes);
        }
        // Callbacks may request new transfers and reallocate the ledger.
        auto on_complete = std::move(rec.on_complete);
        auto bytes = std::move(rec.bytes);
        if (on_complete) {
            on_complete(bytes);
        }
        pump();
    }

    /// Moves an active transfer back to the queue, crediting the bytes sent.
    void pause_transfer(TransferRec &rec) {
        rec.tr = step_transfer(rec.tr, kernel.now() - rec.active_since);
        if (rec.completion_scheduled) {
            cancel(rec.completion_seq);
            rec.completion_scheduled = false;
        }
        rec.state = TransferState::Queued;
    }

    void on_window_close(ActorId a, ActorId b) {
        const double now = kernel.now();
        std::vector<std::uint64_t> finished;
        for (auto tid : open_transfers) {
            auto &rec = transfers[tid];
            if (rec.state != TransferState::Active || pair_key(rec.tr.src, rec.tr.dst) != pair_key(a, b)) {
                continue;
            }
            if (rec.completion_time <= now) {
                finished.push_back(tid);
                continue;
            }
            pause_transfer(rec);
            if (rec.tr.complete()) {
                finished.push_back(tid);
            }
        }
        for (auto tid : finished) {
            auto &rec = transfers[tid];
            if (rec.completion_scheduled) {
                cancel(rec.completion_seq);
                rec.completion_scheduled = false;
            }
            Payload pc;
            pc.set("transfer", tid);
            pc.set("src", name(rec.tr.src));
            pc.set("bytes", rec.tr.total_bytes);
            emit(rec.tr.dst, EventKind::TransferComplete, std::move(pc),
                 [this, tid](EventRecord &) { complete_transfer(tid); });
            rec.state = TransferState::Active;
        }
        pump();
    }

    void cancel_transfer(std::uint64_t tid) {
        auto &rec = transfers[tid];
        if (rec.state == TransferState::Active) {
            pause_transfer(rec);
        }
        rec.state = TransferState::Cancelled;
        close_transfer(tid);
        if (rec.account) {
            rec.account(rec.tr.sent_bytes);
        }
    }

    // ---- federated learning -----------------------------------------------

    std::size_t client_index(ActorId id) const {
        const auto &cl = fl->setup.plan.clients;
        return static_cast<std::size_t>(std::find(cl.begin(), cl.end(), id) - cl.begin());
    }

    void configure(FederatedSetup setup) {
        const auto &plan = setup.plan;
        validate(plan);
        if (plan.server >= actors.size()) {
            throw UnknownActor("federated server is not a registered actor");
        }
        if (setup.datasets.size() != plan.clients.size()) {
            throw std::invalid_argument("need one dataset per federated client");
        }
        if (setup.initial.dim() == 0) {
            throw std::invalid_argument("initial global model is empty");
        }
        for (std::size_t k = 0; k < plan.clients.size(); ++k) {
            const auto c = plan.clients[k];
            if (c >= actors.size()) {
                throw UnknownActor("federated client is not a registered actor");
            }
            if (c == plan.server) {
                throw std::invalid_argument("the server cannot also be a client");
            }
            if (!link_between(actors[plan.server], actors[c])) {
                throw std::invalid_argument("no link between server " + name(plan.server) + " and client " +
                                            name(c));
            }
            if (setup.datasets[k].d != setup.initial.dim()) {
                throw std::invalid_argument("client dataset dim does not match the model dim");
            }
        }
        auto sorted = plan.clients;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw std::invalid_argument("duplicate federated client");
        }
        FlState st;
        st.global = setup.initial;
        st.setup = std::move(setup);
        fl = std::move(st);
    }

    ClientRecord &client_record(std::size_t c) { return fl->report.clients[c]; }

    void saturation_event(ActorId id, std::size_t count, std::uint32_t round) {
        if (count == 0) {
            return;
        }
        Payload p;
        p.set("round", round);
        p.set("values_clamped", static_cast<std::uint64_t>(count));
        emit(id, EventKind::Saturation, std::move(p));
    }

    void begin_round() {
        auto &st = *fl;
        const auto &plan = st.setup.plan;
        const std::uint32_t round = st.next_round_id++;
        st.active = true;
        st.updates.clear();
        st.report = RoundReport{};
        st.report.round_id = round;
        st.report.t_start = kernel.now();
        st.clients.clear();
        for (std::size_t k = 0; k < plan.clients.size(); ++k) {
            ClientRecord rec;
            rec.client = plan.clients[k];
            rec.name = name(plan.clients[k]);
            rec.samples = st.setup.datasets[k].n;
            st.report.clients.push_back(std::move(rec));
            FlClient fc;
            fc.id = plan.clients[k];
            st.clients.push_back(std::move(fc));
        }
        auto q = quantize(st.global, round, plan.encoding);
        st.global_payload = std::move(q.payload);
        saturation_event(plan.server, q.saturated, round);

        Payload p{{"action", "start"}};
        p.set("round", round);
        emit(plan.server, EventKind::RoundEvent, std::move(p));

        const double deadline = kernel.now() + plan.round_timeout;
        st.timeout_scheduled = false;
        if (deadline <= cfg.horizon) {
            Payload pt{{"action", "deadline"}};
            pt.set("round", round);
            st.timeout_seq = schedule(deadline, plan.server, EventKind::RoundEvent, std::move(pt),
                                      [this, round](EventRecord &) {
                                          fl->timeout_scheduled = false;
                                          if (fl->active && fl->report.round_id == round) {
                                              finish_round(RoundStatus::Timeout);
                                          }
                                      });
            st.timeout_scheduled = true;
        }
        for (std::size_t c = 0; c < plan.clients.size(); ++c) {
            send_uplink(c);
        }
    }

    bool round_is(std::uint32_t round) const { return fl && fl->active && fl->report.round_id == round; }

    void send_uplink(std::size_t c) {
        auto &st = *fl;
        const auto round = st.report.round_id;
        st.clients[c].attempts_up++;
        client_record(c).status = ClientStatus::Uploading;
        request_transfer(
            st.setup.plan.server, st.clients[c].id, st.global_payload.bytes,
            [this, c, round](std::vector<std::uint8_t> &bytes) { on_uplink(c, round, bytes); }, round,
            [this, c, round](std::uint64_t n) {
                if (fl && fl->report.round_id == round) {
                    client_record(c).bytes_up += n;
                    fl->report.bytes_on_wire += n;
                }
            },
            [this, c, round] {
                if (fl && fl->report.round_id == round) {
                    client_record(c).corruptions++;
                }
            });
    }

    void send_downlink(std::size_t c) {
        auto &st = *fl;
        const auto round = st.report.round_id;
        st.clients[c].attempts_down++;
        client_record(c).status = ClientStatus::Reporting;
        request_transfer(
            st.clients[c].id, st.setup.plan.server, st.clients[c].update.bytes,
            [this, c, round](std::vector<std::uint8_t> &bytes) { on_downlink(c, round, bytes); }, round,
            [this, c, round](std::uint64_t n) {
                if (fl && fl->report.round_id == round) {
                    client_record(c).bytes_down += n;
                    fl->report.bytes_on_wire += n;
                }
            },
            [this, c, round] {
                if (fl && fl->report.round_id == round) {
                    client_record(c).corruptions++;
                }
            });
    }

    /// Decodes a received payload; nullopt if the header is invalid or the
    /// values are not finite.
    std::optional<ParamVector> decode(const std::vector<std::uint8_t> &bytes, std::uint32_t round) const {
        try {
            auto v = dequantize(QuantizedPayload{bytes}, static_cast<std::uint32_t>(fl->global.dim()), round);
            for (double x : v.values) {
                if (!std::isfinite(x)) {
                    return std::nullopt;
                }
            }
            return v;
        } catch (const PayloadError &) {
            return std::nullopt;
        }
    }

    void on_uplink(std::size_t c, std::uint32_t round, std::vector<std::uint8_t> &bytes) {
        if (!round_is(round)) {
            return;
        }
        auto &st = *fl;
        const auto &plan = st.setup.plan;
        auto v = decode(bytes, round);
        if (!v) {
            if (st.clients[c].attempts_up < plan.max_attempts) {
                client_record(c).retransmissions++;
                send_uplink(c);
            } else {
                client_record(c).status = ClientStatus::Failed;
                client_record(c).reason = "uplink_corrupt";
            }
            return;
        }
        st.clients[c].received = std::move(*v);
        Activity train;
        train.name = "train_r" + std::to_string(round);
        train.duration = plan.train_duration;
        train.power = plan.train_power;
        train.heat = plan.train_heat;
        st.clients[c].train_start = kernel.now();
        client_record(c).status = ClientStatus::Training;
        const auto idx = static_cast<std::size_t>(st.clients[c].id);
        auto adm = register_activity(idx, train, kernel.now(),
                                     [this, c, round](ActivityStatus s, double at, std::string_view reason) {
                                         on_trained(c, round, s, at, reason);
                                     });
        if (!adm.accepted) {
            client_record(c).status = ClientStatus::Refused;
            client_record(c).reason = std::string(to_string(adm.reason));
        }
    }

    void on_trained(std::size_t c, std::uint32_t round, ActivityStatus status, double at, std::string_view reason) {
        if (!round_is(round)) {
            return;
        }
        auto &st = *fl;
        const auto &plan = st.setup.plan;
        client_record(c).train_energy = plan.train_power * (at - st.clients[c].train_start);
        if (status != ActivityStatus::Completed) {
            client_record(c).status = ClientStatus::Aborted;
            client_record(c).reason = std::string(reason);
            return;
        }
        auto w = local_train(st.clients[c].received, st.setup.datasets[c], plan.local_steps, plan.learning_rate,
                             plan.l2);
        auto q = quantize(w, round, plan.encoding);
        saturation_event(st.clients[c].id, q.saturated, round);
        st.clients[c].update = std::move(q.payload);
        send_downlink(c);
    }

    void on_downlink(std::size_t c, std::uint32_t round, std::vector<std::uint8_t> &bytes) {
        if (!round_is(round)) {
            return;
        }
        auto &st = *fl;
        const auto &plan = st.setup.plan;
        auto v = decode(bytes, round);
        if (!v) {
            if (st.clients[c].attempts_down < plan.max_attempts) {
                client_record(c).retransmissions++;
                send_downlink(c);
            } else {
                client_record(c).status = ClientStatus::Failed;
                client_record(c).reason = "downlink_corrupt";
            }
            return;
        }
        client_record(c).status = ClientStatus::Aggregated;
        client_record(c).latency = kernel.now() - st.report.t_start;
        st.updates.push_back({std::move(*v), st.setup.datasets[c].n});
        st.report.updates_aggregated++;
        if (st.updates.size() >= plan.quorum) {
            st.global = fedavg(st.updates);
            finish_round(RoundStatus::Completed);
        }
    }

    void finish_round(RoundStatus status) {
        auto &st = *fl;
        const auto round = st.report.round_id;
        if (st.timeout_scheduled) {
            cancel(st.timeout_seq);
            st.timeout_scheduled = false;
        }
        // Settle in-flight transfers of this round before closing the books.
        std::vector<std::uint64_t> stale;
        for (auto tid : open_transfers) {
            if (transfers[tid].round == round) {
                stale.push_back(tid);
            }
        }
        for (auto tid : stale) {
            cancel_transfer(tid);
        }
        st.active = false;
        st.report.status = status;
        st.report.t_end = kernel.now();
        st.report.global_checksum = model_checksum(st.global);
        if (status == RoundStatus::Completed) {
            st.completed++;
        }
        Payload p{{"action", std::string(to_string(status))}};
        p.set("round", round);
        p.set("updates", st.report.updates_aggregated);
        p.set("checksum", st.report.global_checksum);
        emit(st.setup.plan.server, EventKind::RoundEvent, std::move(p));
        st.reports.push_back(st.report);
        pump();
        if (st.rounds_remaining > 0) {
            st.rounds_remaining--;
        }
        if (st.rounds_remaining > 0) {
            begin_round();
        }
    }
};

Simulation::Simulation(SimulationConfig cfg, std::vector<Actor> actors)
    : impl_(std::make_unique<Impl>(std::move(cfg), std::move(actors))) {}

Simulation::~Simulation() = default;
Simulation::Simulation(Simulation &&) noexcept = default;
Simulation &Simulation::operator=(Simulation &&) noexcept = default;

const SimulationConfig &Simulation::config() const noexcept { return impl_->cfg; }
double Simulation::now() const noexcept { return impl_->kernel.now(); }
const std::vector<Actor> &Simulation::actors() const noexcept { return impl_->actors; }

const Actor &Simulation::actor(ActorId id) const {
    if (id >= impl_->actors.size()) {
        throw UnknownActor("unknown actor id " + std::to_string(id));
    }
    return impl_->actors[id];
}

ActorId Simulation::id_of(std::string_view name) const {
    for (const auto &a : impl_->actors) {
        if (a.name == name) {
            return a.id;
        }
    }
    throw UnknownActor("unknown actor '" + std::string(name) + "'");
}

std::vector<EventRecord> Simulation::advance_to(double t) {
    if (t > impl_->cfg.horizon) {
        throw std::out_of_range("cannot advance to t=" + format_double(t) + " past the horizon " +
                                format_double(impl_->cfg.horizon));
    }
    const auto first = impl_->log.size();
    impl_->kernel.advance_to(t);
    return {impl_->log.begin() + static_cast<std::ptrdiff_t>(first), impl_->log.end()};
}

Admission Simulation::register_activity(ActorId id, const Activity &activity, double start,
                                        ActivityCallback on_end) {
    actor(id);
    return impl_->register_activity(id, activity, start, std::move(on_end));
}

void Simulation::request_activity_at(ActorId id, Activity activity, double at) {
    actor(id);
    validate(activity);
    Payload p{{"activity", activity.name}};
    impl_->schedule(at, id, EventKind::ActivityRequest, std::move(p),
                    [im = impl_.get(), id, act = std::move(activity)](EventRecord &ev) {
                        auto adm = im->register_activity(id, act, im->kernel.now(), {});
                        ev.payload.set("accepted", adm.accepted);
                    });
}

void Simulation::abort_on_fault(ActorId id) {
    actor(id);
    Payload p{{"type", "restart"}};
    p.set("effect", impl_->abort_activity(id, "radiation_restart") ? "abort" : "no-op");
    impl_->emit(id, EventKind::Fault, std::move(p));
}

ActorSnapshot Simulation::snapshot(ActorId id) const {
    actor(id);
    return impl_->make_snapshot(id, now());
}

ActorSnapshot Simulation::snapshot(ActorId id, double t) const {
    actor(id);
    if (t > now()) {
        throw std::out_of_range("snapshot time is in the future");
    }
    if (t == now()) {
        return snapshot(id);
    }
    const auto &hist = impl_->rt[id].history;
    auto it = std::upper_bound(hist.begin(), hist.end(), t,
                               [](double x, const ActorSnapshot &s) { return x < s.time; });
    if (it == hist.begin()) {
        if (hist.empty()) {
            return snapshot(id);
        }
        return hist.front();
    }
    return *std::prev(it);
}

std::vector<Window> Simulation::windows(ActorId a, ActorId b) const {
    actor(a);
    actor(b);
    auto it = impl_->windows.find(pair_key(a, b));
    if (it == impl_->windows.end()) {
        return {};
    }
    auto ws = it->second;
    for (auto &w : ws) {
        w.peer_a = a;
        w.peer_b = b;
    }
    return ws;
}

std::vector<Window> Simulation::all_windows() const {
    std::vector<Window> out;
    for (const auto &[key, ws] : impl_->windows) {
        out.insert(out.end(), ws.begin(), ws.end());
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const Window &x, const Window &y) { return x.t_open < y.t_open; });
    return out;
}

std::vector<Window> Simulation::eclipses(ActorId id) const {
    actor(id);
    return impl_->eclipses[id];
}

bool Simulation::in_window(ActorId a, ActorId b, double t) const {
    return impl_->current_window(a, b, t) != nullptr;
}

std::uint64_t Simulation::request_transfer(ActorId src, ActorId dst, std::vector<std::uint8_t> bytes,
                                           std::function<void(std::vector<std::uint8_t> &)> on_complete) {
    return impl_->request_transfer(src, dst, std::move(bytes), std::move(on_complete));
}

Transfer Simulation::transfer(std::uint64_t id) const {
    const auto &rec = impl_->transfers.at(id);
    Transfer tr = rec.tr;
    if (rec.state == Impl::TransferState::Active) {
        tr = step_transfer(tr, now() - rec.active_since);
    }
    return tr;
}

void Simulation::configure_federated(FederatedSetup setup) { impl_->configure(std::move(setup)); }

void Simulation::start_rounds() {
    if (!impl_->fl) {
        throw std::logic_error("federated learning is not configured");
    }
    if (impl_->fl->active) {
        throw std::logic_error("a round is already running");
    }
    impl_->fl->rounds_remaining = impl_->fl->setup.plan.rounds;
    if (impl_->fl->rounds_remaining > 0) {
        impl_->begin_round();
    }
}

RoundReport Simulation::run_round() {
    auto &im = *impl_;
    if (!im.fl) {
        throw std::logic_error("federated learning is not configured");
    }
    if (!im.fl->active) {
        im.fl->rounds_remaining = 1;
        im.begin_round();
    }
    const auto round = im.fl->report.round_id;
    while (im.round_is(round)) {
        auto next = im.kernel.next_event_time();
        if (!next || *next > im.cfg.horizon) {
            advance_to(im.cfg.horizon);
            if (im.round_is(round)) {
                im.fl->rounds_remaining = 0;
                im.finish_round(RoundStatus::Timeout);
            }
            break;
        }
        advance_to(std::max(*next, now()));
    }
    // Flush bookkeeping events emitted at the completion instant.
    advance_to(now());
    return im.fl->reports.back();
}

const std::vector<RoundReport> &Simulation::round_reports() const noexcept {
    static const std::vector<RoundReport> kEmpty;
    return impl_->fl ? impl_->fl->reports : kEmpty;
}

const ParamVector &Simulation::global_model() const {
    if (!impl_->fl) {
        throw std::logic_error("federated learning is not configured");
    }
    return impl_->fl->global;
}

std::uint32_t Simulation::completed_rounds() const noexcept { return impl_->fl ? impl_->fl->completed : 0; }

const std::vector<EventRecord> &Simulation::event_log() const noexcept { return impl_->log; }
const std::vector<TelemetryRow> &Simulation::telemetry() const noexcept { return impl_->telemetry; }
const std::vector<ActivityLogRow> &Simulation::activity_log() const noexcept { return impl_->activity_log; }

} // namespace constlab
