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

#include "constlab/metrics.hpp"

#include <charconv>
#include <numeric>
#include <sstream>
#include <string_view>

namespace constlab {

namespace {

__extension__ typedef unsigned __int128 u128;

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv_line(const std::string &line) {
    std::vector<std::string> out;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cell += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cell += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(trim(cell));
            cell.clear();
        } else {
            cell += c;
        }
    }
    out.push_back(trim(cell));
    return out;
}

} // namespace

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.size() < 2) {
        throw MetricsError("confusion matrix needs at least 2 classes");
    }
    counts_.assign(labels_.size() * labels_.size(), 0);
}

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> labels,
                                 std::vector<std::vector<std::uint64_t>> counts)
    : ConfusionMatrix(std::move(labels)) {
    if (counts.size() != classes()) {
        throw MetricsError("confusion matrix needs " + std::to_string(classes()) + " rows, got " +
                           std::to_string(counts.size()));
    }
    for (std::size_t r = 0; r < classes(); ++r) {
        if (counts[r].size() != classes()) {
            throw MetricsError("confusion matrix row " + std::to_string(r) + " has " +
                               std::to_string(counts[r].size()) + " columns, expected " +
                               std::to_string(classes()));
        }
        for (std::size_t c = 0; c < classes(); ++c) {
            at(r, c) = counts[r][c];
        }
    }
}

ConfusionMatrix ConfusionMatrix::from_counts(std::vector<std::vector<std::uint64_t>> counts) {
    std::vector<std::string> labels;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        labels.push_back(std::to_string(k));
    }
    return ConfusionMatrix(std::move(labels), std::move(counts));
}

std::uint64_t ConfusionMatrix::total() const noexcept {
    return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

std::uint64_t ConfusionMatrix::row_sum(std::size_t k) const {
    std::uint64_t s = 0;
    for (std::size_t c = 0; c < classes(); ++c) {
        s += at(k, c);
    }
    return s;
}

std::uint64_t ConfusionMatrix::col_sum(std::size_t k) const {
    std::uint64_t s = 0;
    for (std::size_t r = 0; r < classes(); ++r) {
        s += at(r, k);
    }
    return s;
}

std::uint64_t ConfusionMatrix::trace() const {
    std::uint64_t s = 0;
    for (std::size_t k = 0; k < classes(); ++k) {
        s += at(k, k);
    }
    return s;
}

double cohens_kappa(const ConfusionMatrix &m) {
    const std::uint64_t n = m.total();
    if (n == 0) {
        throw MetricsError("kappa is undefined for an empty confusion matrix");
    }
    // Integer numerators: p_o = trace / N, p_e = sum(row*col) / N^2, so
    // kappa = (N*trace - S) / (N^2 - S) with S = sum(row*col).
    u128 agree = 0;
    for (std::size_t k = 0; k < m.classes(); ++k) {
        agree += static_cast<u128>(m.row_sum(k)) * m.col_sum(k);
    }
    const u128 n2 = static_cast<u128>(n) * n;
    const u128 observed = static_cast<u128>(n) * m.trace();
    if (agree == n2) {
        throw MetricsError("kappa is undefined when chance agreement p_e = 1");
    }
    const double num = static_cast<double>(observed) - static_cast<double>(agree);
    const double den = static_cast<double>(n2 - agree);
    return num / den;
}

double competition_loss(const ConfusionMatrix &m) { return 1.0 - cohens_kappa(m); }

std::uint64_t ClassDistribution::total() const noexcept {
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

ClassDistribution opssat_eval_distribution() {
    return {{"Agricultural", "Cloud", "Mountain", "Natural", "River", "Ice", "Snow", "Water"},
            {36, 114, 99, 58, 31, 37, 106, 107}};
}

ClassDistribution opssat_train_distribution() {
    auto d = opssat_eval_distribution();
    d.counts.assign(d.labels.size(), 10);
    return d;
}

ConfusionMatrix read_confusion_csv(std::istream &in) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> predicted;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) {
            auto cells = split_csv_line(line);
            predicted.assign(cells.begin() + 1, cells.end());
            break;
        }
    }
    if (predicted.size() < 2) {
        throw MetricsError("line " + std::to_string(line_no) +
                           ": header must list at least 2 predicted labels");
    }
    const std::size_t k = predicted.size();
    std::vector<std::string> truth_labels;
    std::vector<std::vector<std::uint64_t>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        auto cells = split_csv_line(line);
        if (cells.size() != k + 1) {
            throw MetricsError("line " + std::to_string(line_no) + ": expected " +
                               std::to_string(k + 1) + " cells, got " + std::to_string(cells.size()));
        }
        std::vector<std::uint64_t> row;
        for (std::size_t c = 1; c <= k; ++c) {
            std::uint64_t v = 0;
            const auto &s = cells[c];
            auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (s.empty() || ec != std::errc{} || end != s.data() + s.size()) {
                throw MetricsError("line " + std::to_string(line_no) + ", column " +
                                   std::to_string(c + 1) + ": '" + s +
                                   "' is not a non-negative integer");
            }
            row.push_back(v);
        }
        truth_labels.push_back(cells[0]);
        rows.push_back(std::move(row));
    }
    if (rows.size() != k) {
        throw MetricsError("expected " + std::to_string(k) + " data rows, got " +
                           std::to_string(rows.size()));
    }
    for (std::size_t r = 0; r < k; ++r) {
        if (!truth_labels[r].empty() && truth_labels[r] != predicted[r]) {
            throw MetricsError("row " + std::to_string(r + 1) + " label '" + truth_labels[r] +
                               "' does not match column label '" + predicted[r] + "'");
        }
    }
    return ConfusionMatrix(std::move(predicted), std::move(rows));
}

} // namespace constlab
