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

// Federated-learning building blocks: parameter vectors, the wire payload,
// the synthetic linear-regression clients, the reference trainer and
// sample-weighted federated averaging. Round orchestration over the
// simulated constellation lives in Simulation::start_rounds.

#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "constlab/kernel.hpp"

namespace constlab {

struct ParamVector {
    std::vector<double> values;

    std::size_t dim() const noexcept { return values.size(); }
    friend bool operator==(const ParamVector &, const ParamVector &) = default;
};

class PayloadError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Value encoding on the wire. Fp16 is the default; Fp64 exists so that
/// experiments can switch quantization off without changing the protocol.
enum class PayloadEncoding : std::uint16_t { Fp16 = 1, Fp64 = 2 };

/// Wire layout, all fields little-endian:
///
///   offset  size  field
///   0       4     magic "CLMP"
///   4       2     version (1 = fp16 values, 2 = fp64 values)
///   6       2     flags, must be 0
///   8       4     dim
///   12      4     round id
///   16      w*dim values (w = 2 for fp16, 8 for fp64)
struct QuantizedPayload {
    std::vector<std::uint8_t> bytes;

    std::size_t byte_size() const noexcept { return bytes.size(); }
};

inline constexpr std::size_t kPayloadHeaderBytes = 16;
inline constexpr std::uint8_t kPayloadMagic[4] = {'C', 'L', 'M', 'P'};

std::size_t payload_size(std::size_t dim, PayloadEncoding encoding = PayloadEncoding::Fp16) noexcept;

struct QuantizeResult {
    QuantizedPayload payload;
    std::size_t saturated = 0; ///< values clamped to +/-65504
};

/// Encodes `v` for round `round_id`. Throws std::invalid_argument on empty
/// or non-finite input.
QuantizeResult quantize(const ParamVector &v, std::uint32_t round_id,
                        PayloadEncoding encoding = PayloadEncoding::Fp16);

struct PayloadHeader {
    PayloadEncoding encoding = PayloadEncoding::Fp16;
    std::uint32_t dim = 0;
    std::uint32_t round_id = 0;
};

/// Parses and checks the header. Throws PayloadError on bad magic, version,
/// flags or a size that disagrees with dim.
PayloadHeader read_header(const QuantizedPayload &p);

/// Decodes a payload, additionally requiring the given dim and round id.
ParamVector dequantize(const QuantizedPayload &p, std::uint32_t expected_dim,
                       std::uint32_t expected_round);
ParamVector dequantize(const QuantizedPayload &p);

/// Synthetic regression data, row-major n x d.
struct ClientDataset {
    std::size_t n = 0;
    std::size_t d = 0;
    std::vector<double> X;
    std::vector<double> y;

    double x(std::size_t row, std::size_t col) const noexcept { return X[row * d + col]; }
};

struct SyntheticConfig {
    std::size_t n = 1024;
    std::size_t d = 8;
    double noise_std = 0.1;
    std::uint64_t seed = 0;
};

/// Ground-truth weights drawn from N(0, 1) for the given seed.
ParamVector synthetic_truth(const SyntheticConfig &cfg);

/// X ~ N(0, 1) entries, y = X w_true + N(0, noise_std^2).
ClientDataset make_synthetic(const SyntheticConfig &cfg);

/// Splits rows into `parts` contiguous shards of near-equal size (the data
/// rows are already IID).
std::vector<ClientDataset> split_iid(const ClientDataset &pooled, std::size_t parts);

/// Full-batch gradient of (1/2n)|Xw - y|^2 + (l2/2)|w|^2.
std::vector<double> loss_gradient(const ParamVector &w, const ClientDataset &data, double l2);

double loss(const ParamVector &w, const ClientDataset &data, double l2);

/// `steps` full-batch gradient-descent updates. Throws DivergenceError if
/// the parameter norm exceeds 1e8.
ParamVector local_train(ParamVector w, const ClientDataset &data, std::uint32_t steps, double lr,
                        double l2);

struct WeightedUpdate {
    ParamVector params;
    std::uint64_t samples = 1; ///< n_k >= 1
};

/// w = sum_k (n_k / sum n) w_k. Throws std::invalid_argument on an empty
/// list, a dim mismatch, or n_k == 0.
ParamVector fedavg(std::span<const WeightedUpdate> updates);

/// FNV-1a 64 over the little-endian IEEE bytes of the values, "0x"-prefixed.
std::string model_checksum(const ParamVector &v);

struct RoundPlan {
    ActorId server = 0;
    std::vector<ActorId> clients;
    std::uint32_t quorum = 1;
    std::uint32_t local_steps = 1;
    double learning_rate = 0.1;
    double l2 = 0.0;
    std::uint32_t rounds = 1;
    double round_timeout = 86400.0;  ///< [s]
    double train_duration = 60.0;    ///< [s]
    double train_power = 2.0;        ///< [W]
    double train_heat = 2.0;         ///< [W]
    PayloadEncoding encoding = PayloadEncoding::Fp16;
    std::uint32_t max_attempts = 3;  ///< per payload per round
};

/// Throws std::invalid_argument unless 1 <= quorum <= |clients|.
void validate(const RoundPlan &plan);

enum class ClientStatus : std::uint8_t {
    Pending,
    Uploading,   ///< global model on its way to the client
    Training,
    Reporting,   ///< update on its way to the server
    Aggregated,  ///< update arrived before quorum closed
    Late,        ///< update arrived after aggregation
    Refused,
    Aborted,
    Failed,      ///< retransmission budget exhausted
};

std::string_view to_string(ClientStatus s) noexcept;

struct ClientRecord {
    ActorId client = 0;
    std::string name;
    std::uint64_t bytes_up = 0;   ///< server -> client, including retransmissions
    std::uint64_t bytes_down = 0; ///< client -> server, including retransmissions
    double train_energy = 0.0;    ///< [J]
    double latency = -1.0;        ///< round start to update arrival [s], -1 if none
    ClientStatus status = ClientStatus::Pending;
    std::string reason;
    std::uint32_t retransmissions = 0;
    std::uint32_t corruptions = 0; ///< bit flips that landed in this client's payloads
    std::uint64_t samples = 0;
};

enum class RoundStatus : std::uint8_t { Running, Completed, Timeout };

std::string_view to_string(RoundStatus s) noexcept;

struct RoundReport {
    std::uint32_t round_id = 0;
    RoundStatus status = RoundStatus::Running;
    double t_start = 0.0;
    double t_end = 0.0;
    std::uint32_t updates_aggregated = 0;
    std::uint64_t bytes_on_wire = 0;
    std::vector<ClientRecord> clients;
    std::string global_checksum;
};

/// One JSON object per line: round_id, status, t_start_s, t_end_s,
/// updates_aggregated, bytes_on_wire, clients[...], global_checksum.
std::string to_jsonl(const RoundReport &report);

} // namespace constlab
