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

#include "constlab/kernel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <system_error>

#include "json.hpp"

namespace constlab {

std::string_view to_string(EventKind kind) noexcept {
    switch (kind) {
    case EventKind::WindowOpen: return "window-open";
    case EventKind::WindowClose: return "window-close";
    case EventKind::TransferStart: return "transfer-start";
    case EventKind::TransferComplete: return "transfer-complete";
    case EventKind::ActivityStart: return "activity-start";
    case EventKind::ActivityEnd: return "activity-end";
    case EventKind::ActivityRefused: return "activity-refused";
    case EventKind::ActivityRequest: return "activity-request";
    case EventKind::Fault: return "fault";
    case EventKind::RoundEvent: return "round-event";
    case EventKind::EclipseEnter: return "eclipse-enter";
    case EventKind::EclipseExit: return "eclipse-exit";
    case EventKind::PowerBlackout: return "power-blackout";
    case EventKind::ThermalViolation: return "thermal-violation";
    case EventKind::Saturation: return "saturation";
    }
    return "unknown";
}

std::string format_double(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) {
        return "nan";
    }
    return std::string(buf, end);
}

Payload &Payload::set(std::string key, std::string value) {
    for (auto &[k, v] : items_) {
        if (k == key) {
            v = std::move(value);
            return *this;
        }
    }
    items_.emplace_back(std::move(key), std::move(value));
    return *this;
}

Payload &Payload::set(std::string key, double value) { return set(std::move(key), format_double(value)); }
Payload &Payload::set(std::string key, std::int64_t value) { return set(std::move(key), std::to_string(value)); }
Payload &Payload::set(std::string key, std::uint64_t value) { return set(std::move(key), std::to_string(value)); }

std::optional<std::string_view> Payload::get(std::string_view key) const {
    for (const auto &[k, v] : items_) {
        if (k == key) {
            return std::string_view(v);
        }
    }
    return std::nullopt;
}

bool event_before(const EventRecord &a, const EventRecord &b) noexcept {
    if (a.time != b.time) {
        return a.time < b.time;
    }
    if (a.actor_id != b.actor_id) {
        return a.actor_id < b.actor_id;
    }
    return a.seq < b.seq;
}

std::optional<double> Kernel::next_event_time() {
    drop_cancelled();
    if (queue_.empty()) {
        return std::nullopt;
    }
    return queue_.top().time;
}

void Kernel::drop_cancelled() {
    while (!queue_.empty() && cancelled_.count(queue_.top().seq) != 0) {
        cancelled_.erase(queue_.top().seq);
        queue_.pop();
    }
}

bool Kernel::cancel(std::uint64_t seq) {
    if (pending_seqs_.erase(seq) == 0) {
        return false;
    }
    cancelled_.insert(seq);
    return true;
}

std::uint64_t Kernel::schedule(EventRecord event) {
    if (!std::isfinite(event.time)) {
        throw SchedulingError("event time is not finite");
    }
    if (event.time < clock_) {
        throw SchedulingError("event at t=" + format_double(event.time) +
                              " is before the clock t=" + format_double(clock_));
    }
    event.seq = next_seq_++;
    const auto seq = event.seq;
    pending_seqs_.insert(seq);
    queue_.push(std::move(event));
    return seq;
}

std::vector<EventRecord> Kernel::advance_to(double t) {
    if (!std::isfinite(t) || t < clock_) {
        throw SchedulingError("advance_to(" + format_double(t) + ") is before the clock t=" +
                              format_double(clock_));
    }
    std::vector<EventRecord> executed;
    for (;;) {
        drop_cancelled();
        const double target = queue_.empty() ? t : std::min(t, queue_.top().time);
        if (target > clock_) {
            const double reached = integrator_ ? integrator_(clock_, target) : target;
            clock_ = std::clamp(reached, clock_, target);
        }
        drop_cancelled();
        if (!queue_.empty() && queue_.top().time <= clock_) {
            EventRecord ev = queue_.top();
            queue_.pop();
            pending_seqs_.erase(ev.seq);
            if (handler_) {
                handler_(ev);
            }
            executed.push_back(std::move(ev));
            continue;
        }
        if (clock_ >= t) {
            break;
        }
    }
    return executed;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

SeededRng::SeededRng(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_id_(stream), engine_(splitmix64(splitmix64(seed) ^ splitmix64(~stream))) {}

double SeededRng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t SeededRng::uniform_index(std::uint64_t n) {
    if (n == 0) {
        throw std::invalid_argument("uniform_index requires n > 0");
    }
    // Rejection sampling keeps every index equally likely.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % n;
}

double SeededRng::exponential(double rate) {
    return -std::log1p(-uniform()) / rate;
}

double SeededRng::normal() {
    double u1;
    do {
        u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t stream_id(ActorId actor, std::uint32_t purpose) noexcept {
    return (static_cast<std::uint64_t>(actor) << 32) | purpose;
}

namespace {

bool looks_numeric(std::string_view s) {
    if (s.empty()) {
        return false;
    }
    double v = 0.0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc{} && end == s.data() + s.size() && std::isfinite(v);
}

std::string csv_field(std::string s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

} // namespace

std::string to_jsonl(const EventRecord &event) {
    // Hand-assembled so key order is fixed and the time keeps its shortest
    // round-trip form.
    nlohmann::ordered_json payload = nlohmann::ordered_json::object();
    for (const auto &[k, v] : event.payload.items()) {
        if (looks_numeric(v)) {
            payload[k] = nlohmann::ordered_json::parse(v);
        } else {
            payload[k] = v;
        }
    }
    std::string line = "{\"time\":" + format_double(event.time) +
                       ",\"actor_id\":" + std::to_string(event.actor_id) + ",\"kind\":\"" +
                       std::string(to_string(event.kind)) + "\",\"payload\":" + payload.dump() + "}";
    return line;
}

std::string to_csv_row(const EventRecord &event) {
    std::string flat;
    for (const auto &[k, v] : event.payload.items()) {
        if (!flat.empty()) {
            flat += ';';
        }
        flat += k;
        flat += '=';
        flat += v;
    }
    return format_double(event.time) + "," + std::to_string(event.actor_id) + "," +
           std::string(to_string(event.kind)) + "," + csv_field(std::move(flat));
}

} // namespace constlab
