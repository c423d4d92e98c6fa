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

#include "constlab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "toml.hpp"

namespace constlab {

std::string Diagnostic::str() const {
    std::string out = source;
    if (line > 0) {
        out += ":" + std::to_string(line);
    }
    out += ": ";
    if (!path.empty()) {
        out += path + ": ";
    }
    return out + message;
}

namespace {

std::string join(const std::vector<Diagnostic> &ds) {
    std::string out;
    for (const auto &d : ds) {
        if (!out.empty()) {
            out += '\n';
        }
        out += d.str();
    }
    return out;
}

} // namespace

ScenarioError::ScenarioError(std::vector<Diagnostic> diagnostics)
    : std::runtime_error(join(diagnostics)), diagnostics_(std::move(diagnostics)) {}

namespace {

std::string child(const std::string &path, std::string_view key) {
    return path.empty() ? std::string(key) : path + "." + std::string(key);
}

std::string index(const std::string &path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

class Reader {
public:
    explicit Reader(std::string source) : source_(std::move(source)) {}

    std::vector<Diagnostic> &diagnostics() { return diags_; }

    void error(const std::string &path, const toml::node *at, std::string message) {
        diags_.push_back({path, source_, line_of(at), std::move(message)});
    }

    static std::size_t line_of(const toml::node *n) {
        return n ? static_cast<std::size_t>(n->source().begin.line) : 0;
    }

    void check_keys(const toml::table &t, const std::string &path, std::initializer_list<std::string_view> allowed) {
        for (const auto &[k, v] : t) {
            if (std::find(allowed.begin(), allowed.end(), k.str()) == allowed.end()) {
                error(child(path, k.str()), &v, "unknown field");
            }
        }
    }

    const toml::table *table(const toml::table &t, std::string_view key, const std::string &path, bool required) {
        const toml::node *n = t.get(key);
        if (!n) {
            if (required) {
                error(child(path, key), &t, "missing required table");
            }
            return nullptr;
        }
        if (!n->is_table()) {
            error(child(path, key), n, "expected a table");
            return nullptr;
        }
        return n->as_table();
    }

    const toml::array *array(const toml::table &t, std::string_view key, const std::string &path) {
        const toml::node *n = t.get(key);
        if (!n) {
            return nullptr;
        }
        if (!n->is_array()) {
            error(child(path, key), n, "expected an array");
            return nullptr;
        }
        return n->as_array();
    }

    std::optional<double> number(const toml::table &t, std::string_view key, const std::string &path,
                                 bool required) {
        const toml::node *n = t.get(key);
        if (!n) {
            if (required) {
                error(child(path, key), &t, "missing required field");
            }
            return std::nullopt;
        }
        double v = 0.0;
        if (auto f = n->as_floating_point()) {
            v = f->get();
        } else if (auto i = n->as_integer()) {
            v = static_cast<double>(i->get());
        } else {
            error(child(path, key), n, "expected a number");
            return std::nullopt;
        }
        if (!std::isfinite(v)) {
            error(child(path, key), n, "must be finite");
            return std::nullopt;
        }
        return v;
    }

    double number_or(const toml::table &t, std::string_view key, const std::string &path, double fallback) {
        return number(t, key, path, false).value_or(fallback);
    }

    std::optional<std::int64_t> integer(const toml::table &t, std::string_view key, const std::string &path,
                                        bool required, std::int64_t min_value = 0) {
        const toml::node *n = t.get(key);
        if (!n) {
            if (required) {
                error(child(path, key), &t, "missing required field");
            }
            return std::nullopt;
        }
        auto i = n->as_integer();
        if (!i) {
            error(child(path, key), n, "expected an integer");
            return std::nullopt;
        }
        if (i->get() < min_value) {
            error(child(path, key), n, "must be >= " + std::to_string(min_value));
            return std::nullopt;
        }
        return i->get();
    }

    std::optional<std::string> string(const toml::table &t, std::string_view key, const std::string &path,
                                      bool required) {
        const toml::node *n = t.get(key);
        if (!n) {
            if (required) {
                error(child(path, key), &t, "missing required field");
            }
            return std::nullopt;
        }
        auto s = n->as_string();
        if (!s) {
            error(child(path, key), n, "expected a string");
            return std::nullopt;
        }
        return s->get();
    }

    std::optional<bool> boolean(const toml::table &t, std::string_view key, const std::string &path) {
        const toml::node *n = t.get(key);
        if (!n) {
            return std::nullopt;
        }
        auto b = n->as_boolean();
        if (!b) {
            error(child(path, key), n, "expected true or false");
            return std::nullopt;
        }
        return b->get();
    }

    std::vector<std::string> strings(const toml::table &t, std::string_view key, const std::string &path) {
        std::vector<std::string> out;
        const auto *arr = array(t, key, path);
        if (!arr) {
            return out;
        }
        for (std::size_t k = 0; k < arr->size(); ++k) {
            const auto *s = (*arr)[k].as_string();
            if (!s) {
                error(index(child(path, key), k), &(*arr)[k], "expected a string");
                continue;
            }
            out.push_back(s->get());
        }
        return out;
    }

    std::optional<Vec3> vec3(const toml::table &t, std::string_view key, const std::string &path) {
        const auto *arr = array(t, key, path);
        if (!arr) {
            return std::nullopt;
        }
        if (arr->size() != 3) {
            error(child(path, key), arr, "expected 3 numbers");
            return std::nullopt;
        }
        double c[3] = {0, 0, 0};
        for (std::size_t k = 0; k < 3; ++k) {
            const auto &n = (*arr)[k];
            if (auto f = n.as_floating_point()) {
                c[k] = f->get();
            } else if (auto i = n.as_integer()) {
                c[k] = static_cast<double>(i->get());
            } else {
                error(index(child(path, key), k), &n, "expected a number");
                return std::nullopt;
            }
        }
        const Vec3 v{c[0], c[1], c[2]};
        if (norm(v) == 0.0) {
            error(child(path, key), arr, "must be a non-zero vector");
            return std::nullopt;
        }
        return v;
    }

    /// Records a failed range check; returns `ok` for chaining.
    bool require(bool ok, const toml::table &t, std::string_view key, const std::string &path,
                 const std::string &message) {
        if (!ok) {
            const toml::node *n = t.get(key);
            error(child(path, key), n ? n : &t, message);
        }
        return ok;
    }

private:
    std::string source_;
    std::vector<Diagnostic> diags_;
};

struct Parser {
    Reader r;
    Scenario sc;
    std::map<std::string, LinkSpec> link_presets;
    std::map<std::string, DevicePreset> device_presets;
    std::map<std::string, std::pair<ActorId, const toml::node *>> actor_ids;

    explicit Parser(std::string source) : r(std::move(source)) {}

    void meta(const toml::table &root) {
        const auto *t = r.table(root, "meta", "", false);
        if (!t) {
            return;
        }
        r.check_keys(*t, "meta", {"name", "t0", "seed"});
        sc.name = r.string(*t, "name", "meta", false).value_or("");
        sc.t0 = r.string(*t, "t0", "meta", false).value_or("");
        if (auto s = r.integer(*t, "seed", "meta", false)) {
            sc.config.seed = static_cast<std::uint64_t>(*s);
        }
    }

    void body(const toml::table &root) {
        const auto *t = r.table(root, "body", "", false);
        if (!t) {
            return;
        }
        auto &b = sc.config.body;
        r.check_keys(*t, "body", {"mu_m3_s2", "radius_m", "rotation_rate_rad_s"});
        b.mu = r.number_or(*t, "mu_m3_s2", "body", b.mu);
        b.radius = r.number_or(*t, "radius_m", "body", b.radius);
        b.rotation_rate = r.number_or(*t, "rotation_rate_rad_s", "body", b.rotation_rate);
        r.require(b.mu > 0.0, *t, "mu_m3_s2", "body", "must be > 0");
        r.require(b.radius > 0.0, *t, "radius_m", "body", "must be > 0");
    }

    void sun(const toml::table &root) {
        const auto *t = r.table(root, "sun", "", false);
        if (!t) {
            return;
        }
        auto &s = sc.config.sun;
        r.check_keys(*t, "sun", {"s0", "plane_normal", "omega_rad_s", "flux_w_m2"});
        if (auto v = r.vec3(*t, "s0", "sun")) {
            s.s0 = normalized(*v);
        }
        if (auto v = r.vec3(*t, "plane_normal", "sun")) {
            s.plane_normal = normalized(*v);
        }
        s.omega_sun = r.number_or(*t, "omega_rad_s", "sun", s.omega_sun);
        s.flux = r.number_or(*t, "flux_w_m2", "sun", s.flux);
        r.require(s.flux >= 0.0, *t, "flux_w_m2", "sun", "must be >= 0");
    }

    void simulation(const toml::table &root) {
        const auto *t = r.table(root, "simulation", "", false);
        if (!t) {
            return;
        }
        auto &c = sc.config;
        const std::string p = "simulation";
        r.check_keys(*t, p, {"horizon_s", "step_s", "coarse_step_s", "telemetry_cadence_s"});
        c.horizon = r.number_or(*t, "horizon_s", p, c.horizon);
        c.step = r.number_or(*t, "step_s", p, c.step);
        c.coarse_step = r.number_or(*t, "coarse_step_s", p, c.coarse_step);
        c.telemetry_cadence = r.number_or(*t, "telemetry_cadence_s", p, c.telemetry_cadence);
        r.require(c.horizon > 0.0, *t, "horizon_s", p, "must be > 0");
        r.require(c.step > 0.0, *t, "step_s", p, "must be > 0");
        r.require(c.coarse_step > 0.0, *t, "coarse_step_s", p, "must be > 0");
        r.require(c.telemetry_cadence >= 0.0, *t, "telemetry_cadence_s", p, "must be >= 0");
    }

    template <typename F>
    void each_table(const toml::table &root, std::string_view key, F &&fn) {
        const auto *arr = r.array(root, key, "");
        if (!arr) {
            return;
        }
        for (std::size_t k = 0; k < arr->size(); ++k) {
            const std::string p = index(std::string(key), k);
            const auto *t = (*arr)[k].as_table();
            if (!t) {
                r.error(p, &(*arr)[k], "expected a table");
                continue;
            }
            fn(*t, p, k);
        }
    }

    void link_preset_tables(const toml::table &root) {
        each_table(root, "link_presets", [&](const toml::table &t, const std::string &p, std::size_t) {
            r.check_keys(t, p, {"name", "bitrate_bps", "kind", "grazing_altitude_m"});
            LinkSpec l;
            l.name = r.string(t, "name", p, true).value_or("");
            l.bitrate = r.number(t, "bitrate_bps", p, true).value_or(1.0);
            r.require(l.bitrate > 0.0, t, "bitrate_bps", p, "must be > 0");
            const auto kind = r.string(t, "kind", p, false).value_or("space-to-ground");
            if (kind == "space-to-ground") {
                l.kind = LinkKind::SpaceToGround;
            } else if (kind == "inter-satellite") {
                l.kind = LinkKind::InterSatellite;
            } else {
                r.error(child(p, "kind"), t.get("kind"), "expected space-to-ground or inter-satellite");
            }
            l.grazing_altitude = r.number_or(t, "grazing_altitude_m", p, l.grazing_altitude);
            r.require(l.grazing_altitude >= 0.0, t, "grazing_altitude_m", p, "must be >= 0");
            if (!l.name.empty()) {
                link_presets[l.name] = l;
            }
        });
    }

    void device_preset_tables(const toml::table &root) {
        each_table(root, "device_presets", [&](const toml::table &t, const std::string &p, std::size_t) {
            r.check_keys(t, p, {"name", "e_synop_j", "e_update_j", "energy_per_inference_j"});
            DevicePreset d;
            d.name = r.string(t, "name", p, true).value_or("");
            d.e_synop = r.number_or(t, "e_synop_j", p, 0.0);
            d.e_update = r.number_or(t, "e_update_j", p, 0.0);
            if (auto e = r.number(t, "energy_per_inference_j", p, false)) {
                d.energy_per_inference = *e;
                r.require(*e >= 0.0, t, "energy_per_inference_j", p, "must be >= 0");
            }
            r.require(d.e_synop >= 0.0, t, "e_synop_j", p, "must be >= 0");
            r.require(d.e_update >= 0.0, t, "e_update_j", p, "must be >= 0");
            if (!d.name.empty()) {
                device_presets[d.name] = d;
            }
        });
    }

    std::optional<LinkSpec> find_link(const std::string &name) const {
        if (auto it = link_presets.find(name); it != link_presets.end()) {
            return it->second;
        }
        return presets::link_by_name(name);
    }

    std::optional<DevicePreset> find_device(const std::string &name) const {
        if (auto it = device_presets.find(name); it != device_presets.end()) {
            return it->second;
        }
        return presets::device_by_name(name);
    }

    void spacecraft(const toml::table &t, const std::string &p, Actor &a) {
        KeplerianElements el;
        if (const auto *o = r.table(t, "orbit", p, true)) {
            const auto op = child(p, "orbit");
            r.check_keys(*o, op, {"a_m", "e", "i_deg", "raan_deg", "argp_deg", "M0_deg"});
            el.a = r.number(*o, "a_m", op, true).value_or(0.0);
            el.e = r.number_or(*o, "e", op, 0.0);
            el.i = deg2rad(r.number_or(*o, "i_deg", op, 0.0));
            el.raan = deg2rad(r.number_or(*o, "raan_deg", op, 0.0));
            el.argp = deg2rad(r.number_or(*o, "argp_deg", op, 0.0));
            el.M0 = deg2rad(r.number_or(*o, "M0_deg", op, 0.0));
            if (o->get("a_m")) {
                r.require(el.a > sc.config.body.radius, *o, "a_m", op,
                          "semi-major axis " + format_double(el.a) + " m must exceed the body radius " +
                              format_double(sc.config.body.radius) + " m");
            }
            r.require(el.e >= 0.0 && el.e < 1.0, *o, "e", op, "eccentricity must satisfy 0 <= e < 1");
        }
        a.position = el;

        SpacecraftResources res;
        if (const auto *b = r.table(t, "battery", p, true)) {
            const auto bp = child(p, "battery");
            r.check_keys(*b, bp, {"capacity_j", "charge_j", "discharge_floor"});
            res.battery.capacity = r.number(*b, "capacity_j", bp, true).value_or(1.0);
            res.battery.charge = r.number_or(*b, "charge_j", bp, res.battery.capacity);
            res.battery.discharge_floor = r.number_or(*b, "discharge_floor", bp, res.battery.discharge_floor);
            r.require(res.battery.capacity > 0.0, *b, "capacity_j", bp, "must be > 0");
            r.require(res.battery.charge >= 0.0 && res.battery.charge <= res.battery.capacity, *b, "charge_j", bp,
                      "must lie in [0, capacity_j]");
            r.require(res.battery.discharge_floor >= 0.0 && res.battery.discharge_floor <= 1.0, *b,
                      "discharge_floor", bp, "must lie in [0, 1]");
        }
        if (const auto *s = r.table(t, "panel", p, true)) {
            const auto sp = child(p, "panel");
            r.check_keys(*s, sp, {"area_m2", "efficiency"});
            res.panel.area = r.number(*s, "area_m2", sp, true).value_or(1.0);
            res.panel.efficiency = r.number_or(*s, "efficiency", sp, res.panel.efficiency);
            r.require(res.panel.area > 0.0, *s, "area_m2", sp, "must be > 0");
            r.require(res.panel.efficiency > 0.0 && res.panel.efficiency <= 1.0, *s, "efficiency", sp,
                      "must lie in (0, 1]");
        }
        if (const auto *h = r.table(t, "thermal", p, true)) {
            const auto hp = child(p, "thermal");
            r.check_keys(*h, hp,
                         {"heat_capacity_j_k", "temperature_k", "rad_coeff_w_k4", "absorbed_solar_w", "t_min_k",
                          "t_max_k"});
            auto &n = res.thermal;
            n.heat_capacity = r.number(*h, "heat_capacity_j_k", hp, true).value_or(1.0);
            n.temperature = r.number_or(*h, "temperature_k", hp, n.temperature);
            n.rad_coeff = r.number_or(*h, "rad_coeff_w_k4", hp, n.rad_coeff);
            n.absorbed_solar = r.number_or(*h, "absorbed_solar_w", hp, n.absorbed_solar);
            n.t_min = r.number_or(*h, "t_min_k", hp, n.t_min);
            n.t_max = r.number_or(*h, "t_max_k", hp, n.t_max);
            r.require(n.heat_capacity > 0.0, *h, "heat_capacity_j_k", hp, "must be > 0");
            r.require(n.temperature > 0.0, *h, "temperature_k", hp, "must be > 0");
            r.require(n.rad_coeff >= 0.0, *h, "rad_coeff_w_k4", hp, "must be >= 0");
            r.require(n.absorbed_solar >= 0.0, *h, "absorbed_solar_w", hp, "must be >= 0");
            r.require(n.t_min <= n.t_max, *h, "t_max_k", hp, "must be >= t_min_k");
        }
        if (const auto *x = r.table(t, "radiation", p, false)) {
            const auto xp = child(p, "radiation");
            r.check_keys(*x, xp, {"rate_corruption_hz", "rate_restart_hz", "rate_failure_hz"});
            auto &m = res.radiation;
            m.rate_corruption = r.number_or(*x, "rate_corruption_hz", xp, 0.0);
            m.rate_restart = r.number_or(*x, "rate_restart_hz", xp, 0.0);
            m.rate_failure = r.number_or(*x, "rate_failure_hz", xp, 0.0);
            r.require(m.rate_corruption >= 0.0, *x, "rate_corruption_hz", xp, "must be >= 0");
            r.require(m.rate_restart >= 0.0, *x, "rate_restart_hz", xp, "must be >= 0");
            r.require(m.rate_failure >= 0.0, *x, "rate_failure_hz", xp, "must be >= 0");
        }
        res.idle_load = r.number_or(t, "idle_load_w", p, res.idle_load);
        res.idle_heat = r.number_or(t, "idle_heat_w", p, res.idle_heat);
        r.require(res.idle_load >= 0.0, t, "idle_load_w", p, "must be >= 0");
        r.require(res.idle_heat >= 0.0, t, "idle_heat_w", p, "must be >= 0");
        a.resources = res;
        for (auto &d : r.strings(t, "devices", p)) {
            a.devices.push_back({std::move(d), false});
        }
    }

    void station(const toml::table &t, const std::string &p, Actor &a) {
        GroundStation gs;
        const double lat = r.number(t, "lat_deg", p, true).value_or(0.0);
        const double lon = r.number(t, "lon_deg", p, true).value_or(0.0);
        const double el = r.number_or(t, "min_elevation_deg", p, 10.0);
        r.require(std::abs(lat) <= 90.0, t, "lat_deg", p, "must lie in [-90, 90]");
        r.require(el >= 0.0 && el < 90.0, t, "min_elevation_deg", p, "must lie in [0, 90)");
        gs.lat = deg2rad(lat);
        gs.lon = deg2rad(lon);
        gs.alt = r.number_or(t, "alt_m", p, 0.0);
        gs.min_elevation = deg2rad(el);
        a.position = gs;
    }

    void actor_tables(const toml::table &root) {
        each_table(root, "actors", [&](const toml::table &t, const std::string &p, std::size_t k) {
            Actor a;
            a.id = static_cast<ActorId>(k);
            a.name = r.string(t, "name", p, true).value_or("");
            const auto kind = r.string(t, "kind", p, true).value_or("");
            if (kind == "spacecraft") {
                r.check_keys(t, p,
                             {"name", "kind", "orbit", "battery", "panel", "thermal", "radiation", "idle_load_w",
                              "idle_heat_w", "links", "devices"});
                spacecraft(t, p, a);
            } else if (kind == "ground_station") {
                r.check_keys(t, p, {"name", "kind", "lat_deg", "lon_deg", "alt_m", "min_elevation_deg", "links"});
                station(t, p, a);
            } else if (t.get("kind")) {
                r.error(child(p, "kind"), t.get("kind"), "expected spacecraft or ground_station");
            }
            const auto links = r.strings(t, "links", p);
            for (std::size_t j = 0; j < links.size(); ++j) {
                if (auto l = find_link(links[j])) {
                    a.links.push_back(*l);
                } else {
                    r.error(index(child(p, "links"), j), t.get("links"), "unknown link preset '" + links[j] + "'");
                }
            }
            if (!a.name.empty()) {
                if (actor_ids.count(a.name)) {
                    r.error(child(p, "name"), t.get("name"), "duplicate actor name '" + a.name + "'");
                } else {
                    actor_ids[a.name] = {a.id, t.get("name")};
                }
            }
            sc.actors.push_back(std::move(a));
        });
        if (sc.actors.empty()) {
            r.error("actors", &root, "scenario needs at least one actor");
        }
    }

    std::optional<ActorId> resolve(const toml::table &t, std::string_view key, const std::string &p, bool required) {
        auto n = r.string(t, key, p, required);
        if (!n) {
            return std::nullopt;
        }
        auto it = actor_ids.find(*n);
        if (it == actor_ids.end()) {
            r.error(child(p, key), t.get(key), "unknown actor '" + *n + "'");
            return std::nullopt;
        }
        return it->second.first;
    }

    std::vector<LayerSpec> layers(const toml::table &t, const std::string &p) {
        std::vector<LayerSpec> out;
        const auto *arr = r.array(t, "layers", p);
        if (!arr) {
            return out;
        }
        for (std::size_t k = 0; k < arr->size(); ++k) {
            const auto lp = index(child(p, "layers"), k);
            const auto *lt = (*arr)[k].as_table();
            if (!lt) {
                r.error(lp, &(*arr)[k], "expected a table");
                continue;
            }
            r.check_keys(*lt, lp, {"n_neurons", "synapses", "mean_rate_hz", "timesteps", "dt_s", "artificial"});
            LayerSpec l;
            l.n_neurons = static_cast<std::uint64_t>(r.integer(*lt, "n_neurons", lp, true).value_or(0));
            if (const auto *syn = lt->get("synapses")) {
                if (auto i = syn->as_integer(); i && i->get() >= 0) {
                    l.synapses_per_neuron.push_back(static_cast<std::uint64_t>(i->get()));
                } else if (auto a = syn->as_array()) {
                    for (std::size_t j = 0; j < a->size(); ++j) {
                        auto v = (*a)[j].as_integer();
                        if (!v || v->get() < 0) {
                            r.error(index(child(lp, "synapses"), j), &(*a)[j], "expected a non-negative integer");
                            continue;
                        }
                        l.synapses_per_neuron.push_back(static_cast<std::uint64_t>(v->get()));
                    }
                } else {
                    r.error(child(lp, "synapses"), syn, "expected a non-negative integer or an array of them");
                }
            } else {
                r.error(child(lp, "synapses"), lt, "missing required field");
            }
            l.dt = r.number_or(*lt, "dt_s", lp, 1.0);
            r.require(l.dt > 0.0, *lt, "dt_s", lp, "must be > 0");
            if (r.boolean(*lt, "artificial", lp).value_or(false)) {
                l = LayerSpec::artificial(l.n_neurons, l.synapses_per_neuron, l.dt);
            } else {
                l.mean_rate = r.number_or(*lt, "mean_rate_hz", lp, 0.0);
                l.timesteps = static_cast<std::uint32_t>(r.integer(*lt, "timesteps", lp, false, 1).value_or(1));
                r.require(l.mean_rate >= 0.0, *lt, "mean_rate_hz", lp, "must be >= 0");
            }
            out.push_back(std::move(l));
        }
        return out;
    }

    void activity_tables(const toml::table &root) {
        each_table(root, "activities", [&](const toml::table &t, const std::string &p, std::size_t) {
            r.check_keys(t, p,
                         {"actor", "name", "start_s", "duration_s", "power_w", "heat_w", "heat_fraction", "device",
                          "inferences", "layers", "min_charge_fraction", "requires_window_with",
                          "temperature_in_limits"});
            ScheduledActivity sa;
            auto id = resolve(t, "actor", p, true);
            auto &act = sa.activity;
            act.name = r.string(t, "name", p, true).value_or("");
            sa.start = r.number(t, "start_s", p, true).value_or(0.0);
            act.duration = r.number(t, "duration_s", p, true).value_or(1.0);
            r.require(sa.start >= 0.0, t, "start_s", p, "must be >= 0");
            r.require(act.duration > 0.0, t, "duration_s", p, "must be > 0");

            const auto power = r.number(t, "power_w", p, false);
            const auto device = r.string(t, "device", p, false);
            if (power && device) {
                r.error(child(p, "device"), t.get("device"), "give either power_w or device, not both");
            }
            if (power) {
                act.power = *power;
                r.require(*power >= 0.0, t, "power_w", p, "must be >= 0");
            } else if (device) {
                const auto inferences = r.integer(t, "inferences", p, false, 1).value_or(1);
                double energy = 0.0;
                auto dev = find_device(*device);
                const auto ls = layers(t, p);
                if (!dev) {
                    r.error(child(p, "device"), t.get("device"), "unknown device preset '" + *device + "'");
                } else if (!ls.empty()) {
                    energy = model_energy(ls, *dev);
                } else if (dev->energy_per_inference) {
                    energy = *dev->energy_per_inference;
                } else {
                    r.error(child(p, "layers"), &t, "device '" + *device +
                                                        "' has no whole-inference energy; list the layers");
                }
                act.power = energy * static_cast<double>(inferences) / std::max(act.duration, 1e-300);
            } else {
                r.error(child(p, "power_w"), &t, "give power_w or a device preset");
            }
            const double heat_fraction = r.number_or(t, "heat_fraction", p, 1.0);
            act.heat = r.number_or(t, "heat_w", p, act.power * heat_fraction);
            r.require(act.heat >= 0.0, t, "heat_w", p, "must be >= 0");
            if (auto f = r.number(t, "min_charge_fraction", p, false)) {
                r.require(*f >= 0.0 && *f <= 1.0, t, "min_charge_fraction", p, "must lie in [0, 1]");
                act.preconditions.min_charge_fraction = *f;
            }
            act.preconditions.requires_window_with = resolve(t, "requires_window_with", p, false);
            act.preconditions.temperature_in_limits = r.boolean(t, "temperature_in_limits", p).value_or(true);
            if (id) {
                sa.actor = *id;
                if (!sc.actors[*id].is_spacecraft()) {
                    r.error(child(p, "actor"), t.get("actor"), "activities run on spacecraft only");
                }
                sc.activities.push_back(std::move(sa));
            }
        });
    }

    void fedlearn(const toml::table &root) {
        const auto *t = r.table(root, "fedlearn", "", false);
        if (!t) {
            return;
        }
        const std::string p = "fedlearn";
        r.check_keys(*t, p,
                     {"server", "clients", "quorum", "local_steps", "learning_rate", "l2", "rounds", "round_timeout_s",
                      "quantize", "dim", "samples_per_client", "noise_std", "data_seed", "train_duration_s",
                      "train_power_w", "train_heat_w", "max_attempts"});
        FederatedScenario f;
        auto &plan = f.plan;
        if (auto s = resolve(*t, "server", p, true)) {
            plan.server = *s;
        }
        const auto names = r.strings(*t, "clients", p);
        if (names.empty()) {
            r.error(child(p, "clients"), t, "needs at least one client");
        }
        for (std::size_t k = 0; k < names.size(); ++k) {
            auto it = actor_ids.find(names[k]);
            if (it == actor_ids.end()) {
                r.error(index(child(p, "clients"), k), t->get("clients"), "unknown actor '" + names[k] + "'");
                continue;
            }
            if (std::find(plan.clients.begin(), plan.clients.end(), it->second.first) != plan.clients.end()) {
                r.error(index(child(p, "clients"), k), t->get("clients"), "duplicate client '" + names[k] + "'");
                continue;
            }
            plan.clients.push_back(it->second.first);
        }
        plan.quorum = static_cast<std::uint32_t>(
            r.integer(*t, "quorum", p, false, 1).value_or(static_cast<std::int64_t>(plan.clients.size())));
        r.require(plan.quorum <= std::max<std::size_t>(plan.clients.size(), 1), *t, "quorum", p,
                  "must not exceed the number of clients");
        plan.local_steps = static_cast<std::uint32_t>(r.integer(*t, "local_steps", p, false).value_or(1));
        plan.learning_rate = r.number_or(*t, "learning_rate", p, plan.learning_rate);
        plan.l2 = r.number_or(*t, "l2", p, plan.l2);
        plan.rounds = static_cast<std::uint32_t>(r.integer(*t, "rounds", p, false).value_or(1));
        plan.round_timeout = r.number_or(*t, "round_timeout_s", p, plan.round_timeout);
        plan.train_duration = r.number_or(*t, "train_duration_s", p, plan.train_duration);
        plan.train_power = r.number_or(*t, "train_power_w", p, plan.train_power);
        plan.train_heat = r.number_or(*t, "train_heat_w", p, plan.train_heat);
        plan.max_attempts = static_cast<std::uint32_t>(r.integer(*t, "max_attempts", p, false, 1).value_or(3));
        plan.encoding = r.boolean(*t, "quantize", p).value_or(true) ? PayloadEncoding::Fp16 : PayloadEncoding::Fp64;
        r.require(plan.learning_rate > 0.0, *t, "learning_rate", p, "must be > 0");
        r.require(plan.l2 >= 0.0, *t, "l2", p, "must be >= 0");
        r.require(plan.round_timeout > 0.0, *t, "round_timeout_s", p, "must be > 0");
        r.require(plan.train_duration > 0.0, *t, "train_duration_s", p, "must be > 0");
        r.require(plan.train_power >= 0.0, *t, "train_power_w", p, "must be >= 0");
        r.require(plan.train_heat >= 0.0, *t, "train_heat_w", p, "must be >= 0");
        f.dim = static_cast<std::size_t>(r.integer(*t, "dim", p, false, 1).value_or(8));
        f.samples_per_client =
            static_cast<std::size_t>(r.integer(*t, "samples_per_client", p, false, 1).value_or(256));
        f.noise_std = r.number_or(*t, "noise_std", p, f.noise_std);
        r.require(f.noise_std >= 0.0, *t, "noise_std", p, "must be >= 0");
        f.data_seed = static_cast<std::uint64_t>(r.integer(*t, "data_seed", p, false).value_or(0));

        if (r.diagnostics().empty()) {
            if (sc.actors[plan.server].is_spacecraft()) {
                r.error(child(p, "server"), t->get("server"), "the server must be a ground station");
            }
            for (std::size_t k = 0; k < plan.clients.size(); ++k) {
                const auto &c = sc.actors[plan.clients[k]];
                if (c.id == plan.server) {
                    r.error(index(child(p, "clients"), k), t->get("clients"), "the server cannot be a client");
                } else if (!link_between(sc.actors[plan.server], c)) {
                    r.error(index(child(p, "clients"), k), t->get("clients"),
                            "no link between server and client '" + c.name + "'");
                }
            }
        }
        sc.fedlearn = f;
    }

    /// Domain validation as a backstop for anything the field checks missed.
    void cross_check(const toml::table &root) {
        if (!r.diagnostics().empty()) {
            return;
        }
        const auto *arr = root.get("actors") ? root.get("actors")->as_array() : nullptr;
        for (std::size_t k = 0; k < sc.actors.size(); ++k) {
            try {
                validate(sc.actors[k], sc.config.body);
            } catch (const std::exception &e) {
                r.error(index("actors", k), arr ? &(*arr)[k] : &root, e.what());
            }
        }
        try {
            validate(sc.config);
        } catch (const std::exception &e) {
            r.error("simulation", &root, e.what());
        }
    }

    Scenario run(const toml::table &root) {
        r.check_keys(root, "",
                     {"meta", "body", "sun", "simulation", "link_presets", "device_presets", "actors", "activities",
                      "fedlearn"});
        meta(root);
        body(root);
        sun(root);
        simulation(root);
        link_preset_tables(root);
        device_preset_tables(root);
        actor_tables(root);
        activity_tables(root);
        fedlearn(root);
        cross_check(root);
        if (!r.diagnostics().empty()) {
            throw ScenarioError(std::move(r.diagnostics()));
        }
        return std::move(sc);
    }
};

} // namespace

Scenario parse_scenario(std::string_view text, std::string source_name) {
    toml::table root;
    try {
        root = toml::parse(text, source_name);
    } catch (const toml::parse_error &e) {
        throw ScenarioError({{"", source_name, static_cast<std::size_t>(e.source().begin.line),
                              std::string(e.description())}});
    }
    Parser parser(std::move(source_name));
    return parser.run(root);
}

Scenario load_scenario(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ScenarioError({{"", path.string(), 0, "cannot open scenario file"}});
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str(), path.string());
}

FederatedSetup make_federated_setup(const FederatedScenario &fed) {
    SyntheticConfig cfg;
    cfg.n = fed.samples_per_client * fed.plan.clients.size();
    cfg.d = fed.dim;
    cfg.noise_std = fed.noise_std;
    cfg.seed = fed.data_seed;
    FederatedSetup setup;
    setup.plan = fed.plan;
    setup.datasets = split_iid(make_synthetic(cfg), fed.plan.clients.size());
    setup.initial.values.assign(fed.dim, 0.0);
    return setup;
}

Simulation build_simulation(const Scenario &scenario, std::optional<std::uint64_t> seed) {
    SimulationConfig cfg = scenario.config;
    if (seed) {
        cfg.seed = *seed;
    }
    Simulation sim(cfg, scenario.actors);
    for (const auto &sa : scenario.activities) {
        sim.request_activity_at(sa.actor, sa.activity, sa.start);
    }
    if (scenario.fedlearn) {
        sim.configure_federated(make_federated_setup(*scenario.fedlearn));
    }
    return sim;
}

} // namespace constlab
