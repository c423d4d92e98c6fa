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

// Deterministic simulation clock, event queue and seeded random streams.
//
// Time is a real-valued offset in seconds from scenario start. Events are
// totally ordered by (time, actor_id, sequence); the sequence counter is
// assigned on insertion and strictly increases within one kernel.

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <queue>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

namespace constlab {

using ActorId = std::uint32_t;

enum class EventKind : std::uint8_t {
    WindowOpen,
    WindowClose,
    TransferStart,
    TransferComplete,
    ActivityStart,
    ActivityEnd,
    ActivityRefused,
    ActivityRequest,
    Fault,
    RoundEvent,
    EclipseEnter,
    EclipseExit,
    PowerBlackout,
    ThermalViolation,
    Saturation,
};

std::string_view to_string(EventKind kind) noexcept;

/// Ordered key/value details attached to an event. Values are pre-rendered
/// strings so logs are byte-stable.
class Payload {
public:
    Payload() = default;
    Payload(std::initializer_list<std::pair<std::string, std::string>> init) : items_(init) {}

    Payload &set(std::string key, std::string value);
    Payload &set(std::string key, double value);
    Payload &set(std::string key, std::int64_t value);
    Payload &set(std::string key, std::uint64_t value);
    Payload &set(std::string key, int value) { return set(std::move(key), static_cast<std::int64_t>(value)); }
    Payload &set(std::string key, unsigned value) { return set(std::move(key), static_cast<std::uint64_t>(value)); }
    Payload &set(std::string key, const char *value) { return set(std::move(key), std::string(value)); }
    Payload &set(std::string key, bool value) { return set(std::move(key), std::string(value ? "true" : "false")); }

    std::optional<std::string_view> get(std::string_view key) const;
    const std::vector<std::pair<std::string, std::string>> &items() const noexcept { return items_; }
    bool empty() const noexcept { return items_.empty(); }

    friend bool operator==(const Payload &, const Payload &) = default;

private:
    std::vector<std::pair<std::string, std::string>> items_;
};

struct EventRecord {
    double time = 0.0;
    ActorId actor_id = 0;
    EventKind kind = EventKind::RoundEvent;
    Payload payload;
    std::uint64_t seq = 0; ///< assigned by Kernel::schedule

    friend bool operator==(const EventRecord &, const EventRecord &) = default;
};

/// Strict weak order (time, actor_id, seq).
bool event_before(const EventRecord &a, const EventRecord &b) noexcept;

/// Shortest round-trip decimal rendering of a double; identical on every
/// conforming platform.
std::string format_double(double v);

class SchedulingError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class Kernel {
public:
    using Handler = std::function<void(EventRecord &)>;
    /// Integrates continuous state over [from, to]. May stop early at a time
    /// where it scheduled new events; returns the time actually reached.
    using Integrator = std::function<double(double from, double to)>;

    Kernel() = default;

    double now() const noexcept { return clock_; }
    std::size_t pending() const noexcept { return pending_seqs_.size(); }
    std::optional<double> next_event_time();

    /// Enqueues `event`, assigning its sequence number. Throws
    /// SchedulingError if event.time < now() or is not finite.
    std::uint64_t schedule(EventRecord event);

    /// Drops a pending event; it will be neither executed nor returned.
    /// Returns false if `seq` is unknown or already executed.
    bool cancel(std::uint64_t seq);

    void set_handler(Handler handler) { handler_ = std::move(handler); }
    void set_integrator(Integrator integrator) { integrator_ = std::move(integrator); }

    /// Runs all events with time <= t in order, integrating continuous
    /// state across every gap, and leaves the clock at t. Returns the
    /// executed events.
    std::vector<EventRecord> advance_to(double t);

private:
    struct Later {
        bool operator()(const EventRecord &a, const EventRecord &b) const noexcept {
            return event_before(b, a);
        }
    };

    void drop_cancelled();

    double clock_ = 0.0;
    std::uint64_t next_seq_ = 0;
    std::priority_queue<EventRecord, std::vector<EventRecord>, Later> queue_;
    std::unordered_set<std::uint64_t> pending_seqs_;
    std::unordered_set<std::uint64_t> cancelled_;
    Handler handler_;
    Integrator integrator_;
};

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Random stream keyed by (seed, stream_id). Built on std::mt19937_64,
/// whose output sequence is fixed by the standard; all conversions to
/// floating point are done here rather than with <random> distributions,
/// whose algorithms are implementation-defined.
class SeededRng {
public:
    SeededRng(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform in [0, 1) with 53 random bits.
    double uniform();
    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t uniform_index(std::uint64_t n);
    /// Exponential variate with the given rate (> 0).
    double exponential(double rate);
    /// Standard normal variate (Box-Muller, one value per call).
    double normal();

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
};

/// Stable stream id for (actor, purpose) pairs.
std::uint64_t stream_id(ActorId actor, std::uint32_t purpose) noexcept;

// Event-log emitters. Both formats share the columns time, actor_id, kind,
// payload; the CSV payload is flattened as key=value;key=value.
std::string to_jsonl(const EventRecord &event);
std::string to_csv_row(const EventRecord &event);
inline constexpr std::string_view kEventCsvHeader = "time,actor_id,kind,payload";

} // namespace constlab
