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


#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "constlab/kernel.hpp"
#include "doctest.h"
#include "generators.hpp"

using namespace constlab;

namespace {

EventRecord ev(double t, ActorId a, EventKind k = EventKind::RoundEvent) {
    EventRecord e;
    e.time = t;
    e.actor_id = a;
    e.kind = k;
    return e;
}

} // namespace

TEST_SUITE("kernel") {

TEST_CASE("equal times dequeue by actor id, then insertion order") {
    Kernel k;
    k.schedule(ev(5.0, 2));
    k.schedule(ev(5.0, 1));
    k.schedule(ev(5.0, 1, EventKind::Fault));
    const auto out = k.advance_to(10.0);
    REQUIRE(out.size() == 3);
    CHECK(out[0].actor_id == 1);
    CHECK(out[0].kind == EventKind::RoundEvent);
    CHECK(out[1].actor_id == 1);
    CHECK(out[1].kind == EventKind::Fault);
    CHECK(out[2].actor_id == 2);
    CHECK(k.now() == 10.0);
}

TEST_CASE("advance_to the current clock with an empty queue returns nothing") {
    Kernel k;
    CHECK(k.advance_to(0.0).empty());
    k.advance_to(3.0);
    CHECK(k.advance_to(3.0).empty());
    CHECK(k.now() == 3.0);
}

TEST_CASE("scheduling in the past or at a non-finite time is rejected") {
    Kernel k;
    k.advance_to(10.0);
    CHECK_THROWS_AS(k.schedule(ev(9.999, 0)), SchedulingError);
    CHECK_THROWS_AS(k.schedule(ev(NAN, 0)), SchedulingError);
    CHECK_THROWS_AS(k.schedule(ev(INFINITY, 0)), SchedulingError);
    CHECK_NOTHROW(k.schedule(ev(10.0, 0)));
    CHECK_THROWS_AS(k.advance_to(5.0), SchedulingError);
}

TEST_CASE("cancelled events are neither executed nor returned") {
    Kernel k;
    int ran = 0;
    k.set_handler([&](EventRecord &) { ++ran; });
    const auto a = k.schedule(ev(1.0, 0));
    k.schedule(ev(2.0, 0));
    CHECK(k.pending() == 2);
    CHECK(k.cancel(a));
    CHECK_FALSE(k.cancel(a));
    CHECK_FALSE(k.cancel(12345));
    CHECK(k.pending() == 1);
    const auto out = k.advance_to(5.0);
    CHECK(out.size() == 1);
    CHECK(ran == 1);
    CHECK(out[0].time == 2.0);
}

TEST_CASE("handlers may schedule follow-up events at the current time") {
    Kernel k;
    std::vector<double> seen;
    k.set_handler([&](EventRecord &e) {
        seen.push_back(e.time);
        if (e.actor_id == 0) {
            k.schedule(ev(k.now(), 1));
        }
    });
    k.schedule(ev(4.0, 0));
    const auto out = k.advance_to(4.0);
    CHECK(out.size() == 2);
    CHECK(seen == std::vector<double>{4.0, 4.0});
}

TEST_CASE("the integrator covers every gap and may stop early") {
    Kernel k;
    std::vector<std::pair<double, double>> spans;
    bool injected = false;
    k.set_integrator([&](double from, double to) {
        if (!injected && from < 2.5 && to > 2.5) {
            injected = true;
            k.schedule(ev(2.5, 7));
            spans.emplace_back(from, 2.5);
            return 2.5;
        }
        spans.emplace_back(from, to);
        return to;
    });
    k.schedule(ev(1.0, 0));
    k.schedule(ev(4.0, 0));
    const auto out = k.advance_to(6.0);
    REQUIRE(out.size() == 3);
    CHECK(out[1].time == 2.5);
    CHECK(out[1].actor_id == 7);
    double covered = 0.0;
    for (std::size_t i = 0; i < spans.size(); ++i) {
        covered += spans[i].second - spans[i].first;
        if (i > 0) {
            CHECK(spans[i].first == spans[i - 1].second);
        }
    }
    CHECK(covered == doctest::Approx(6.0));
}

TEST_CASE("the clock never moves backwards along the executed sequence") {
    gen::Gen g(11);
    for (std::size_t trial = 0; trial < 50; ++trial) {
        Kernel k;
        std::vector<EventRecord> mine;
        const auto n = g.integer(1, 60);
        for (std::int64_t i = 0; i < n; ++i) {
            auto e = ev(static_cast<double>(g.integer(0, 20)), static_cast<ActorId>(g.integer(0, 4)));
            e.seq = k.schedule(e);
            mine.push_back(e);
        }
        // Sort oracle.
        std::stable_sort(mine.begin(), mine.end(), [](const EventRecord &a, const EventRecord &b) {
            if (a.time != b.time) {
                return a.time < b.time;
            }
            if (a.actor_id != b.actor_id) {
                return a.actor_id < b.actor_id;
            }
            return a.seq < b.seq;
        });
        const auto out = k.advance_to(30.0);
        INFO(gen::where(g, trial));
        REQUIRE(out.size() == mine.size());
        for (std::size_t i = 0; i < out.size(); ++i) {
            CHECK(out[i].seq == mine[i].seq);
            if (i > 0) {
                CHECK(out[i].time >= out[i - 1].time);
            }
        }
    }
}

TEST_CASE("seeded streams are reproducible and independent") {
    SeededRng a(42, stream_id(3, 7));
    SeededRng b(42, stream_id(3, 7));
    SeededRng c(42, stream_id(3, 8));
    SeededRng d(43, stream_id(3, 7));
    bool differs_c = false, differs_d = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next_u64();
        CHECK(x == b.next_u64());
        differs_c |= x != c.next_u64();
        differs_d |= x != d.next_u64();
    }
    CHECK(differs_c);
    CHECK(differs_d);
    CHECK(stream_id(3, 7) == ((std::uint64_t{3} << 32) | 7));
}

TEST_CASE("rng conversions stay in range and have the right first moments") {
    SeededRng r(1, 2);
    double sum_u = 0.0, sum_e = 0.0, sum_n = 0.0, sum_n2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum_u += u;
        sum_e += r.exponential(4.0);
        const double z = r.normal();
        sum_n += z;
        sum_n2 += z * z;
        REQUIRE(r.uniform_index(7) < 7);
    }
    CHECK(sum_u / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(sum_e / n == doctest::Approx(0.25).epsilon(0.01));
    CHECK(std::abs(sum_n / n) < 0.01);
    CHECK(sum_n2 / n == doctest::Approx(1.0).epsilon(0.01));
    CHECK_THROWS_AS(r.uniform_index(0), std::invalid_argument);
}

TEST_CASE("event records render to a fixed JSON line and CSV row") {
    EventRecord e = ev(12.5, 3, EventKind::WindowOpen);
    e.payload.set("peer_a", "sat0").set("duration_s", 61.25).set("note", "a,b");
    CHECK(to_jsonl(e) ==
          R"({"time":12.5,"actor_id":3,"kind":"window-open","payload":{"peer_a":"sat0","duration_s":61.25,"note":"a,b"}})");
    CHECK(to_csv_row(e) == R"(12.5,3,window-open,"peer_a=sat0;duration_s=61.25;note=a,b")");
    CHECK(e.payload.get("duration_s") == "61.25");
    CHECK_FALSE(e.payload.get("missing"));
    e.payload.set("peer_a", "sat1");
    CHECK(e.payload.items().size() == 3);
    CHECK(format_double(0.1) == "0.1");
}

}
