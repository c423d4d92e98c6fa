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

#include "constlab/fedlearn.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "constlab/float16.hpp"
#include "json.hpp"

namespace constlab {

namespace {

constexpr std::uint32_t kTruthStream = 1;
constexpr std::uint32_t kDataStream = 2;
constexpr double kDivergenceNorm = 1e8;

void put_u16(std::uint8_t *p, std::uint16_t v) {
    p[0] = static_cast<std::uint8_t>(v);
    p[1] = static_cast<std::uint8_t>(v >> 8);
}

void put_u32(std::uint8_t *p, std::uint32_t v) {
    for (int k = 0; k < 4; ++k) {
        p[k] = static_cast<std::uint8_t>(v >> (8 * k));
    }
}

void put_u64(std::uint8_t *p, std::uint64_t v) {
    for (int k = 0; k < 8; ++k) {
        p[k] = static_cast<std::uint8_t>(v >> (8 * k));
    }
}

std::uint16_t get_u16(const std::uint8_t *p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t get_u32(const std::uint8_t *p) {
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) {
        v |= static_cast<std::uint32_t>(p[k]) << (8 * k);
    }
    return v;
}

std::uint64_t get_u64(const std::uint8_t *p) {
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k) {
        v |= static_cast<std::uint64_t>(p[k]) << (8 * k);
    }
    return v;
}

std::size_t value_width(PayloadEncoding encoding) noexcept {
    return encoding == PayloadEncoding::Fp16 ? 2 : 8;
}

} // namespace

std::size_t payload_size(std::size_t dim, PayloadEncoding encoding) noexcept {
    return kPayloadHeaderBytes + value_width(encoding) * dim;
}

QuantizeResult quantize(const ParamVector &v, std::uint32_t round_id, PayloadEncoding encoding) {
    if (v.values.empty()) {
        throw std::invalid_argument("cannot quantize an empty parameter vector");
    }
    QuantizeResult out;
    auto &bytes = out.payload.bytes;
    bytes.assign(payload_size(v.dim(), encoding), 0);
    std::copy(std::begin(kPayloadMagic), std::end(kPayloadMagic), bytes.begin());
    put_u16(&bytes[4], static_cast<std::uint16_t>(encoding));
    put_u16(&bytes[6], 0);
    put_u32(&bytes[8], static_cast<std::uint32_t>(v.dim()));
    put_u32(&bytes[12], round_id);

    std::uint8_t *p = bytes.data() + kPayloadHeaderBytes;
    for (double x : v.values) {
        if (!std::isfinite(x)) {
            throw std::invalid_argument("cannot quantize a non-finite parameter");
        }
        if (encoding == PayloadEncoding::Fp16) {
            const auto enc = fp16::encode(x);
            out.saturated += enc.saturated ? 1 : 0;
            put_u16(p, enc.bits);
            p += 2;
        } else {
            put_u64(p, std::bit_cast<std::uint64_t>(x));
            p += 8;
        }
    }
    return out;
}

PayloadHeader read_header(const QuantizedPayload &payload) {
    const auto &b = payload.bytes;
    if (b.size() < kPayloadHeaderBytes) {
        throw PayloadError("payload shorter than its header");
    }
    if (!std::equal(std::begin(kPayloadMagic), std::end(kPayloadMagic), b.begin())) {
        throw PayloadError("payload magic mismatch");
    }
    const auto version = get_u16(&b[4]);
    if (version != static_cast<std::uint16_t>(PayloadEncoding::Fp16) &&
        version != static_cast<std::uint16_t>(PayloadEncoding::Fp64)) {
        throw PayloadError("unsupported payload version " + std::to_string(version));
    }
    if (get_u16(&b[6]) != 0) {
        throw PayloadError("payload flags must be zero");
    }
    PayloadHeader h;
    h.encoding = static_cast<PayloadEncoding>(version);
    h.dim = get_u32(&b[8]);
    h.round_id = get_u32(&b[12]);
    if (h.dim == 0 || b.size() != payload_size(h.dim, h.encoding)) {
        throw PayloadError("payload size disagrees with its dim field");
    }
    return h;
}

ParamVector dequantize(const QuantizedPayload &payload) {
    const auto h = read_header(payload);
    ParamVector v;
    v.values.reserve(h.dim);
    const std::uint8_t *p = payload.bytes.data() + kPayloadHeaderBytes;
    for (std::uint32_t k = 0; k < h.dim; ++k) {
        if (h.encoding == PayloadEncoding::Fp16) {
            v.values.push_back(fp16::decode(get_u16(p)));
            p += 2;
        } else {
            v.values.push_back(std::bit_cast<double>(get_u64(p)));
            p += 8;
        }
    }
    return v;
}

ParamVector dequantize(const QuantizedPayload &payload, std::uint32_t expected_dim,
                       std::uint32_t expected_round) {
    const auto h = read_header(payload);
    if (h.dim != expected_dim) {
        throw PayloadError("payload dim " + std::to_string(h.dim) + " != expected " +
                           std::to_string(expected_dim));
    }
    if (h.round_id != expected_round) {
        throw PayloadError("payload round " + std::to_string(h.round_id) + " != expected " +
                           std::to_string(expected_round));
    }
    return dequantize(payload);
}

ParamVector synthetic_truth(const SyntheticConfig &cfg) {
    SeededRng rng(cfg.seed, kTruthStream);
    ParamVector w;
    w.values.resize(cfg.d);
    for (auto &x : w.values) {
        x = rng.normal();
    }
    return w;
}

ClientDataset make_synthetic(const SyntheticConfig &cfg) {
    if (cfg.n == 0 || cfg.d == 0) {
        throw std::invalid_argument("synthetic dataset needs n >= 1 and d >= 1");
    }
    const auto truth = synthetic_truth(cfg);
    SeededRng rng(cfg.seed, kDataStream);
    ClientDataset data;
    data.n = cfg.n;
    data.d = cfg.d;
    data.X.resize(cfg.n * cfg.d);
    data.y.resize(cfg.n);
    for (std::size_t i = 0; i < cfg.n; ++i) {
        double yi = 0.0;
        for (std::size_t j = 0; j < cfg.d; ++j) {
            const double xij = rng.normal();
            data.X[i * cfg.d + j] = xij;
            yi += xij * truth.values[j];
        }
        data.y[i] = yi + cfg.noise_std * rng.normal();
    }
    return data;
}

std::vector<ClientDataset> split_iid(const ClientDataset &pooled, std::size_t parts) {
    if (parts == 0 || parts > pooled.n) {
        throw std::invalid_argument("split_iid needs 1 <= parts <= n");
    }
    std::vector<ClientDataset> out;
    std::size_t row = 0;
    for (std::size_t k = 0; k < parts; ++k) {
        const std::size_t rows = pooled.n / parts + (k < pooled.n % parts ? 1 : 0);
        ClientDataset shard;
        shard.n = rows;
        shard.d = pooled.d;
        shard.X.assign(pooled.X.begin() + static_cast<std::ptrdiff_t>(row * pooled.d),
                       pooled.X.begin() + static_cast<std::ptrdiff_t>((row + rows) * pooled.d));
        shard.y.assign(pooled.y.begin() + static_cast<std::ptrdiff_t>(row),
                       pooled.y.begin() + static_cast<std::ptrdiff_t>(row + rows));
        out.push_back(std::move(shard));
        row += rows;
    }
    return out;
}

std::vector<double> loss_gradient(const ParamVector &w, const ClientDataset &data, double l2) {
    if (w.dim() != data.d) {
        throw std::invalid_argument("parameter dim does not match the dataset");
    }
    std::vector<double> g(data.d, 0.0);
    for (std::size_t i = 0; i < data.n; ++i) {
        double r = -data.y[i];
        for (std::size_t j = 0; j < data.d; ++j) {
            r += data.x(i, j) * w.values[j];
        }
        for (std::size_t j = 0; j < data.d; ++j) {
            g[j] += data.x(i, j) * r;
        }
    }
    const double inv_n = 1.0 / static_cast<double>(data.n);
    for (std::size_t j = 0; j < data.d; ++j) {
        g[j] = g[j] * inv_n + l2 * w.values[j];
    }
    return g;
}

double loss(const ParamVector &w, const ClientDataset &data, double l2) {
    double sse = 0.0;
    for (std::size_t i = 0; i < data.n; ++i) {
        double r = -data.y[i];
        for (std::size_t j = 0; j < data.d; ++j) {
            r += data.x(i, j) * w.values[j];
        }
        sse += r * r;
    }
    double reg = 0.0;
    for (double x : w.values) {
        reg += x * x;
    }
    return 0.5 * sse / static_cast<double>(data.n) + 0.5 * l2 * reg;
}

ParamVector local_train(ParamVector w, const ClientDataset &data, std::uint32_t steps, double lr,
                        double l2) {
    if (w.dim() != data.d) {
        throw std::invalid_argument("parameter dim does not match the dataset");
    }
    for (std::uint32_t s = 0; s < steps; ++s) {
        const auto g = loss_gradient(w, data, l2);
        double norm2 = 0.0;
        for (std::size_t j = 0; j < w.dim(); ++j) {
            w.values[j] -= lr * g[j];
            norm2 += w.values[j] * w.values[j];
        }
        if (!std::isfinite(norm2) || std::sqrt(norm2) > kDivergenceNorm) {
            throw DivergenceError("local training diverged at step " + std::to_string(s + 1) +
                                  " (|w| > 1e8); learning rate " + format_double(lr) +
                                  " is too high");
        }
    }
    return w;
}

ParamVector fedavg(std::span<const WeightedUpdate> updates) {
    if (updates.empty()) {
        throw std::invalid_argument("fedavg needs at least one update");
    }
    const std::size_t dim = updates.front().params.dim();
    std::uint64_t total = 0;
    for (const auto &u : updates) {
        if (u.params.dim() != dim) {
            throw std::invalid_argument("fedavg dim mismatch: " + std::to_string(u.params.dim()) +
                                        " vs " + std::to_string(dim));
        }
        if (u.samples == 0) {
            throw std::invalid_argument("fedavg sample counts must be >= 1");
        }
        total += u.samples;
    }

    // Canonical order makes the floating-point sum independent of arrival
    // order; offsetting by the first update makes identical inputs exact.
    std::vector<const WeightedUpdate *> order;
    order.reserve(updates.size());
    for (const auto &u : updates) {
        order.push_back(&u);
    }
    std::sort(order.begin(), order.end(), [](const WeightedUpdate *a, const WeightedUpdate *b) {
        if (a->params.values != b->params.values) {
            return a->params.values < b->params.values;
        }
        return a->samples < b->samples;
    });

    const auto &ref = order.front()->params.values;
    ParamVector out{ref};
    const double inv_total = 1.0 / static_cast<double>(total);
    for (std::size_t j = 0; j < dim; ++j) {
        double acc = 0.0;
        for (const auto *u : order) {
            acc += static_cast<double>(u->samples) * (u->params.values[j] - ref[j]);
        }
        out.values[j] = ref[j] + acc * inv_total;
    }
    return out;
}

std::string model_checksum(const ParamVector &v) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (double x : v.values) {
        const auto bits = std::bit_cast<std::uint64_t>(x);
        for (int k = 0; k < 8; ++k) {
            h ^= (bits >> (8 * k)) & 0xffu;
            h *= 0x100000001b3ULL;
        }
    }
    char buf[24];
    std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void validate(const RoundPlan &plan) {
    if (plan.clients.empty()) {
        throw std::invalid_argument("round plan has no clients");
    }
    if (plan.quorum < 1 || plan.quorum > plan.clients.size()) {
        throw std::invalid_argument("quorum must satisfy 1 <= quorum <= number of clients");
    }
    if (!(plan.learning_rate > 0.0)) {
        throw std::invalid_argument("learning_rate must be > 0");
    }
    if (!(plan.l2 >= 0.0)) {
        throw std::invalid_argument("l2 must be >= 0");
    }
    if (!(plan.train_duration > 0.0)) {
        throw std::invalid_argument("train_duration must be > 0");
    }
    if (!(plan.round_timeout > 0.0)) {
        throw std::invalid_argument("round_timeout must be > 0");
    }
    if (plan.max_attempts < 1) {
        throw std::invalid_argument("max_attempts must be >= 1");
    }
}

std::string_view to_string(ClientStatus s) noexcept {
    switch (s) {
    case ClientStatus::Pending: return "pending";
    case ClientStatus::Uploading: return "uploading";
    case ClientStatus::Training: return "training";
    case ClientStatus::Reporting: return "reporting";
    case ClientStatus::Aggregated: return "aggregated";
    case ClientStatus::Late: return "late";
    case ClientStatus::Refused: return "refused";
    case ClientStatus::Aborted: return "aborted";
    case ClientStatus::Failed: return "failed";
    }
    return "unknown";
}

std::string_view to_string(RoundStatus s) noexcept {
    switch (s) {
    case RoundStatus::Running: return "running";
    case RoundStatus::Completed: return "completed";
    case RoundStatus::Timeout: return "timeout";
    }
    return "unknown";
}

std::string to_jsonl(const RoundReport &report) {
    nlohmann::ordered_json j;
    j["round_id"] = report.round_id;
    j["status"] = std::string(to_string(report.status));
    j["t_start_s"] = report.t_start;
    j["t_end_s"] = report.t_end;
    j["updates_aggregated"] = report.updates_aggregated;
    j["bytes_on_wire"] = report.bytes_on_wire;
    auto clients = nlohmann::ordered_json::array();
    for (const auto &c : report.clients) {
        nlohmann::ordered_json cj;
        cj["client"] = c.name;
        cj["actor_id"] = c.client;
        cj["bytes_up"] = c.bytes_up;
        cj["bytes_down"] = c.bytes_down;
        cj["train_energy_J"] = c.train_energy;
        cj["latency_s"] = c.latency;
        cj["status"] = std::string(to_string(c.status));
        cj["reason"] = c.reason;
        cj["retransmissions"] = c.retransmissions;
        cj["corruptions"] = c.corruptions;
        clients.push_back(std::move(cj));
    }
    j["clients"] = std::move(clients);
    j["global_checksum"] = report.global_checksum;
    return j.dump();
}

} // namespace constlab
